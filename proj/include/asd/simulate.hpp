#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "asd/corpus.hpp"
#include "asd/dialog_state.hpp"
#include "asd/neural.hpp"
#include "asd/rng.hpp"

namespace asd {

struct SymptomExample {
  DialogState state;
  SymptomId label;  // implicit symptom still NotQueried in state
};

struct ActionExample {
  DialogState state;
  bool conclude = false;  // every implicit symptom is known
};

/// Builds the state reached after the agent queried `known_implicit` (in S_i)
/// and `unrelated` (outside S_e and S_i). The last user reply is drawn
/// uniformly from the queried symptoms; SelfReport when nothing was queried.
DialogState compose_state(const UserGoal& goal, std::span<const SymptomId> known_implicit,
                          std::span<const SymptomId> unrelated, Rng& rng, const EncoderConfig& cfg);

/// Masked sampling for the symptom task: a strict random subset of S_i is
/// revealed together with random unrelated queries; the label is one of the
/// still-hidden implicit symptoms.
SymptomExample simulate_symptom_state(const UserGoal& goal, Rng& rng, const EncoderConfig& cfg);

/// complete = true reveals all of S_i (label Conclude); otherwise a strict
/// subset (label Query).
ActionExample simulate_action_state(const UserGoal& goal, Rng& rng, const EncoderConfig& cfg, bool complete);

struct Dataset {
  Task task = Task::Action;
  EncoderConfig encoder;
  std::vector<std::string> symptoms;
  std::size_t per_goal = 0;
  std::uint64_t seed = 0;
  std::vector<LabeledVector> train;
  std::vector<LabeledVector> test;

  bool operator==(const Dataset&) const = default;
};

/// Per-example RNG stream for (seed, goal id, ordinal).
Rng example_rng(std::uint64_t seed, const UserGoal& goal, std::size_t ordinal);

/// per_goal examples for every goal of each split. The action task makes the
/// first half of each goal's examples complete (Conclude) and the rest
/// partial; the symptom task draws all partial states.
Dataset build_dataset(const Corpus& corpus, Task task, std::size_t per_goal, std::uint64_t seed, const EncoderConfig& cfg);

/// Directory layout: meta.json, train.jsonl, test.jsonl. Each JSONL record is
/// {"label": int, "task": "action"|"symptom", "x": [numbers]}.
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace asd
