#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "asd/types.hpp"

namespace asd {

class KnowledgeGraph;

struct SymptomAssignment {
  SymptomId symptom;
  bool present = true;  // true = 1 (confirmed), false = 0 (denied)
  bool operator==(const SymptomAssignment&) const = default;
};

enum class Split { Train, Test };

/// One patient case. Explicit symptoms come from the self-report; implicit
/// ones are those a doctor asked about. The two sets are disjoint.
struct UserGoal {
  std::string id;
  DiseaseId disease;
  std::vector<SymptomAssignment> explicit_symptoms;
  std::vector<SymptomAssignment> implicit_symptoms;
  Split split = Split::Train;

  bool operator==(const UserGoal&) const = default;

  /// Truth value of a symptom in S_e or S_i; nullopt if the goal does not
  /// mention it.
  std::optional<bool> lookup(SymptomId s) const;
  bool is_implicit(SymptomId s) const;
  bool is_explicit(SymptomId s) const;
};

struct Corpus {
  std::vector<std::string> symptoms;  // canonical index order
  std::vector<std::string> diseases;
  std::vector<UserGoal> goals;

  bool operator==(const Corpus&) const = default;

  std::optional<SymptomId> find_symptom(const std::string& name) const;
  std::optional<DiseaseId> find_disease(const std::string& name) const;
  std::vector<UserGoal> goals_in(Split split) const;
};

struct CorpusStats {
  std::size_t goals = 0;
  std::size_t train = 0;
  std::size_t test = 0;
  double mean_explicit = 0.0;
  double mean_implicit = 0.0;
};

/// Checks every goal invariant; throws on the first violation.
void validate(const Corpus& corpus);

/// Goals without a "split" tag are split 80/20 with a shuffle seeded by
/// split_seed; tagged goals keep their tag.
Corpus load_corpus(const std::filesystem::path& path, std::uint64_t split_seed = 0);
Corpus corpus_from_json(const std::string& text, std::uint64_t split_seed = 0);
std::string corpus_to_json(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

CorpusStats corpus_stats(const Corpus& corpus);

/// Per-goal symptom counts are 1 + Poisson(mean - 1). Symptoms are drawn from
/// the goal disease's neighborhood with probability neighborhood_bias, else
/// from the whole vocabulary. Within a neighborhood each disease has a fixed
/// random ranking of its symptoms and rank r is drawn with weight
/// (r + 1)^-prevalence_skew, so a few core symptoms dominate.
struct SynthOptions {
  double neighborhood_bias = 0.95;
  double prevalence_skew = 4.0;
  double explicit_present = 0.95;
  double implicit_present = 0.65;
};

Corpus synth_corpus(std::uint64_t seed, std::size_t n_goals, const KnowledgeGraph& kg, double mean_explicit,
                    double mean_implicit, const SynthOptions& options = {});

}  // namespace asd
