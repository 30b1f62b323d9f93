#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "asd/corpus.hpp"
#include "asd/dialog_state.hpp"
#include "asd/neural.hpp"
#include "asd/simulate.hpp"

namespace asd {

class KnowledgeGraph;

struct TrainConfig {
  double learning_rate = 0.025;
  double weight_decay = 0.001;
  int epochs = 40;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;

  /// lr 0.025 for the MLP, 0.035 for the GMemNN; wd 0.001; 40 epochs.
  static TrainConfig defaults(Arch arch);
  void check() const;
};

struct ModelOptions {
  std::size_t hidden = 0;  // 0 selects the architecture default
  bool tie_symptom_matrices = false;
  bool tie_disease_matrices = false;
};

struct EpochRecord {
  double loss = 0.0;
  double test_accuracy = 0.0;  // NaN when the dataset has no test split
};

struct TrainedModel {
  Model model;
  TrainConfig train_config;
  std::vector<EpochRecord> history;
};

/// Shuffled mini-batch SGD for train_config.epochs epochs. The model's task is
/// the dataset's task; kg is required iff arch is gmemnn.
TrainedModel train_model(const Dataset& dataset, Arch arch, const KnowledgeGraph* kg, const TrainConfig& cfg,
                         const ModelOptions& options = {});

/// Fraction of argmax hits. For the symptom task already-known symptoms are
/// masked out before the argmax.
double evaluate_unit(const Model& model, const KnowledgeGraph* kg, std::span<const LabeledVector> examples,
                     const EncoderConfig& encoder);

void save_trained(const TrainedModel& tm, const std::filesystem::path& path);
TrainedModel load_trained(const std::filesystem::path& path);
std::string trained_to_json(const TrainedModel& tm);

struct TrialReport {
  std::vector<double> accuracies;
  double mean = 0.0;
  double stdev = 0.0;  // sample standard deviation, n - 1 denominator
};

TrialReport summarize_trials(std::vector<double> accuracies);

/// Each trial re-simulates the dataset and re-initializes the model from its
/// own seed, derived from base_seed and the trial index.
TrialReport run_trials(std::size_t n_trials, const Corpus& corpus, Arch arch, Task task, const KnowledgeGraph* kg,
                       const TrainConfig& base, std::size_t per_goal, const EncoderConfig& encoder,
                       std::uint64_t base_seed, const ModelOptions& options = {});

}  // namespace asd
