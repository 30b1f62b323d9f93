#include "asd/train.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "asd/checkpoint.hpp"
#include "asd/error.hpp"
#include "asd/io.hpp"
#include "asd/kgraph.hpp"
#include "asd/rng.hpp"

namespace asd {

using nlohmann::json;

TrainConfig TrainConfig::defaults(Arch arch) {
  TrainConfig c;
  c.learning_rate = arch == Arch::Mlp ? 0.025 : 0.035;
  return c;
}

void TrainConfig::check() const {
  if (!(learning_rate > 0.0) || weight_decay < 0.0 || epochs < 1 || batch_size < 1) {
    fail(Errc::InvalidArgument, "learning rate, epochs and batch size must be positive; weight decay non-negative");
  }
}

TrainedModel train_model(const Dataset& dataset, Arch arch, const KnowledgeGraph* kg, const TrainConfig& cfg,
                         const ModelOptions& options) {
  cfg.check();
  if (dataset.train.empty()) fail(Errc::InvalidArgument, "training set is empty");
  if (arch == Arch::Gmemnn && !kg) fail(Errc::InvalidArgument, "gmemnn training needs a knowledge graph");
  ModelConfig mc;
  mc.arch = arch;
  mc.task = dataset.task;
  mc.in_dim = dataset.encoder.input_dim();
  mc.n_symptoms = dataset.encoder.n_symptoms;
  mc.n_diseases = arch == Arch::Gmemnn ? kg->n_diseases() : 0;
  mc.hidden = options.hidden ? options.hidden : default_hidden(arch);
  mc.t_max = dataset.encoder.t_max;
  mc.tie_symptom_matrices = options.tie_symptom_matrices;
  mc.tie_disease_matrices = options.tie_disease_matrices;
  if (arch == Arch::Gmemnn && kg->n_symptoms() != mc.n_symptoms) {
    fail(Errc::ShapeMismatch, "knowledge graph symptom count differs from the dataset");
  }
  for (const auto& r : dataset.train) {
    if (r.x.size() != mc.in_dim) fail(Errc::ShapeMismatch, "dataset vector length differs from encoder config");
    if (r.label >= mc.out_dim()) fail(Errc::OutOfRange, "dataset label outside the output space");
  }

  TrainedModel tm{Model::create(mc, mix_seed(cfg.seed, 1)), cfg, {}};
  Model grads = Model::zeros_like(tm.model);
  Rng shuffle_rng(mix_seed(cfg.seed, 2));
  std::vector<const LabeledVector*> order;
  for (const auto& r : dataset.train) order.push_back(&r);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t n = std::min(cfg.batch_size, order.size() - start);
      const double loss = loss_and_gradients(tm.model, kg, std::span(order).subspan(start, n), grads);
      if (!std::isfinite(loss)) fail(Errc::NonFinite, "training loss became non-finite at epoch " + std::to_string(epoch));
      loss_sum += loss * static_cast<double>(n);
      sgd_step(tm.model, grads, cfg.learning_rate, cfg.weight_decay);
    }
    EpochRecord rec;
    rec.loss = loss_sum / static_cast<double>(order.size());
    rec.test_accuracy = dataset.test.empty() ? std::numeric_limits<double>::quiet_NaN()
                                             : evaluate_unit(tm.model, kg, dataset.test, dataset.encoder);
    tm.history.push_back(rec);
  }
  return tm;
}

double evaluate_unit(const Model& model, const KnowledgeGraph* kg, std::span<const LabeledVector> examples,
                     const EncoderConfig& encoder) {
  if (examples.empty()) fail(Errc::InvalidArgument, "empty test set");
  const Predictor predictor(model, kg);
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    Vec z = predictor.logits(ex.x);
    if (model.config.task == Task::Symptom) z = masked_logits(z, known_mask(ex.x, encoder));
    if (argmax(z) == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

std::string trained_to_json(const TrainedModel& tm) {
  json j = model_to_json(tm.model);
  j["train_config"] = {{"learning_rate", tm.train_config.learning_rate},
                       {"weight_decay", tm.train_config.weight_decay},
                       {"epochs", tm.train_config.epochs},
                       {"batch_size", tm.train_config.batch_size},
                       {"seed", tm.train_config.seed}};
  json hist = json::array();
  for (const auto& h : tm.history) {
    hist.push_back({{"loss", h.loss}, {"test_accuracy", std::isnan(h.test_accuracy) ? json(nullptr) : json(h.test_accuracy)}});
  }
  j["history"] = std::move(hist);
  return j.dump() + "\n";
}

void save_trained(const TrainedModel& tm, const std::filesystem::path& path) { write_file(path, trained_to_json(tm)); }

TrainedModel load_trained(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    fail(Errc::Parse, "checkpoint " + path.string() + ": " + e.what());
  }
  TrainedModel tm{model_from_json(j), {}, {}};
  try {
    if (j.contains("train_config")) {
      const json& c = j["train_config"];
      tm.train_config.learning_rate = c.at("learning_rate").get<double>();
      tm.train_config.weight_decay = c.at("weight_decay").get<double>();
      tm.train_config.epochs = c.at("epochs").get<int>();
      tm.train_config.batch_size = c.at("batch_size").get<std::size_t>();
      tm.train_config.seed = c.at("seed").get<std::uint64_t>();
    }
    if (j.contains("history")) {
      for (const auto& h : j["history"]) {
        EpochRecord r;
        r.loss = h.at("loss").get<double>();
        r.test_accuracy = h.at("test_accuracy").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                          : h.at("test_accuracy").get<double>();
        tm.history.push_back(r);
      }
    }
  } catch (const json::exception& e) {
    fail(Errc::Parse, "checkpoint " + path.string() + ": " + e.what());
  }
  return tm;
}

TrialReport summarize_trials(std::vector<double> accuracies) {
  TrialReport r;
  r.accuracies = std::move(accuracies);
  const double n = static_cast<double>(r.accuracies.size());
  if (r.accuracies.empty()) return r;
  r.mean = std::accumulate(r.accuracies.begin(), r.accuracies.end(), 0.0) / n;
  if (r.accuracies.size() > 1) {
    double ss = 0.0;
    for (double a : r.accuracies) ss += (a - r.mean) * (a - r.mean);
    r.stdev = std::sqrt(ss / (n - 1.0));
  }
  return r;
}

TrialReport run_trials(std::size_t n_trials, const Corpus& corpus, Arch arch, Task task, const KnowledgeGraph* kg,
                       const TrainConfig& base, std::size_t per_goal, const EncoderConfig& encoder,
                       std::uint64_t base_seed, const ModelOptions& options) {
  if (n_trials < 2) fail(Errc::InvalidArgument, "run_trials needs at least 2 trials");
  std::vector<double> acc;
  for (std::size_t t = 0; t < n_trials; ++t) {
    const std::uint64_t seed = mix_seed(base_seed, 0x7121, t);
    const Dataset ds = build_dataset(corpus, task, per_goal, seed, encoder);
    TrainConfig cfg = base;
    cfg.seed = seed;
    const TrainedModel tm = train_model(ds, arch, kg, cfg, options);
    acc.push_back(evaluate_unit(tm.model, kg, ds.test, ds.encoder));
  }
  return summarize_trials(std::move(acc));
}

}  // namespace asd
