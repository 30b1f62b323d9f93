#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "asd/error.hpp"
#include "asd/kgraph.hpp"
#include "asd/simulate.hpp"
#include "asd/train.hpp"
#include "support.hpp"

using namespace asd;
using asd::test::TempDir;

namespace {

Errc code_of(const auto& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Parse;
}

struct Fixture {
  KnowledgeGraph kg = synth_graph(7, 66, 28, 284, 810);
  Corpus corpus = synth_corpus(7, 60, kg, 2.35, 3.26);
  EncoderConfig enc;
};

// 25 goals with one complete and one partial state each.
Dataset capacity_dataset(const Fixture& f) {
  Dataset ds;
  ds.task = Task::Action;
  ds.encoder = f.enc;
  ds.symptoms = f.corpus.symptoms;
  for (std::size_t gi = 0; gi < 25; ++gi) {
    for (bool complete : {true, false}) {
      Rng rng = example_rng(1, f.corpus.goals[gi], complete);
      const ActionExample ex = simulate_action_state(f.corpus.goals[gi], rng, f.enc, complete);
      ds.train.push_back({vectorize(ex.state, f.enc), ex.conclude ? kConclude : kQuery});
    }
  }
  return ds;
}

std::vector<Matrix> tensors_of(const Model& m) {
  std::vector<Matrix> v;
  m.for_each_tensor([&](const char*, const Matrix& t, bool) { v.push_back(t); });
  return v;
}

}  // namespace

TEST_CASE("default hyperparameters") {
  const TrainConfig mlp = TrainConfig::defaults(Arch::Mlp);
  const TrainConfig gm = TrainConfig::defaults(Arch::Gmemnn);
  CHECK(mlp.learning_rate == 0.025);
  CHECK(gm.learning_rate == 0.035);
  for (const TrainConfig& c : {mlp, gm}) {
    CHECK(c.weight_decay == 0.001);
    CHECK(c.epochs == 40);
    CHECK(c.batch_size == 32);
  }
  TrainConfig bad = mlp;
  bad.epochs = 0;
  CHECK(code_of([&] { bad.check(); }) == Errc::InvalidArgument);
}

TEST_CASE("both architectures can fit 50 action states") {
  Fixture f;
  const Dataset ds = capacity_dataset(f);
  REQUIRE(ds.train.size() == 50);
  for (Arch arch : {Arch::Mlp, Arch::Gmemnn}) {
    TrainConfig cfg = TrainConfig::defaults(arch);
    cfg.epochs = 200;
    cfg.batch_size = 1;
    cfg.seed = 3;
    const TrainedModel tm = train_model(ds, arch, &f.kg, cfg);
    CHECK(tm.history.size() == 200);
    const double acc = evaluate_unit(tm.model, &f.kg, ds.train, ds.encoder);
    INFO(to_string(arch) << " training accuracy " << acc);
    CHECK(acc >= 0.99);
    for (const auto& h : tm.history) CHECK(std::isfinite(h.loss));
    CHECK(std::isnan(tm.history.back().test_accuracy));
  }
}

TEST_CASE("training is deterministic in the seed") {
  Fixture f;
  const Dataset ds = build_dataset(f.corpus, Task::Symptom, 3, 2, f.enc);
  for (Arch arch : {Arch::Mlp, Arch::Gmemnn}) {
    TrainConfig cfg = TrainConfig::defaults(arch);
    cfg.epochs = 2;
    cfg.seed = 9;
    const TrainedModel a = train_model(ds, arch, &f.kg, cfg);
    const TrainedModel b = train_model(ds, arch, &f.kg, cfg);
    CHECK(tensors_of(a.model) == tensors_of(b.model));
    CHECK(trained_to_json(a) == trained_to_json(b));
    cfg.seed = 10;
    CHECK_FALSE(tensors_of(train_model(ds, arch, &f.kg, cfg).model) == tensors_of(a.model));
    for (const auto& h : a.history) {
      CHECK(std::isfinite(h.loss));
      CHECK(h.test_accuracy >= 0.0);
    }
  }
}

TEST_CASE("the other GMemNN head is left at its initial values") {
  Fixture f;
  const Dataset ds = build_dataset(f.corpus, Task::Action, 2, 2, f.enc);
  TrainConfig cfg = TrainConfig::defaults(Arch::Gmemnn);
  cfg.epochs = 2;
  cfg.seed = 4;
  const TrainedModel tm = train_model(ds, Arch::Gmemnn, &f.kg, cfg);
  const Model fresh = Model::create(tm.model.config, mix_seed(4, 1));
  const auto& p = std::get<GmemnnParams>(tm.model.params);
  const auto& q = std::get<GmemnnParams>(fresh.params);
  CHECK(p.wsym == q.wsym);
  CHECK(p.bsym == q.bsym);
  CHECK_FALSE(p.wact == q.wact);
  CHECK_FALSE(p.wx == q.wx);
}

TEST_CASE("unit evaluation") {
  Fixture f;
  const Dataset act = build_dataset(f.corpus, Task::Action, 20, 1, f.enc);
  ModelConfig c;
  c.arch = Arch::Mlp;
  c.task = Task::Action;
  c.in_dim = f.enc.input_dim();
  c.n_symptoms = 66;
  c.hidden = 4;
  Model constant = Model::zeros_like(Model::create(c, 1));
  std::get<MlpParams>(constant.params).b2(kQuery, 0) = 1.0;
  CHECK(evaluate_unit(constant, nullptr, act.test, f.enc) == 0.5);

  // Ordering does not matter.
  std::vector<LabeledVector> shuffled = act.test;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(evaluate_unit(constant, nullptr, shuffled, f.enc) == 0.5);

  // Known symptoms are masked before the argmax.
  const UserGoal g = test::bronchiolitis_goal();
  const Vec x = vectorize(DialogState::initial(g.explicit_symptoms, 66), f.enc);
  const std::vector<LabeledVector> one{{x, test::sym("Fever").value}};
  c.task = Task::Symptom;
  Model sym = Model::zeros_like(Model::create(c, 1));
  std::get<MlpParams>(sym.params).b2(test::sym("Cough").value, 0) = 10.0;
  std::get<MlpParams>(sym.params).b2(test::sym("Fever").value, 0) = 5.0;
  CHECK(evaluate_unit(sym, nullptr, one, f.enc) == 1.0);
  CHECK(code_of([&] { evaluate_unit(sym, nullptr, {}, f.enc); }) == Errc::InvalidArgument);
}

TEST_CASE("training input validation") {
  Fixture f;
  Dataset ds = build_dataset(f.corpus, Task::Action, 2, 2, f.enc);
  const TrainConfig cfg = TrainConfig::defaults(Arch::Gmemnn);
  CHECK(code_of([&] { train_model(ds, Arch::Gmemnn, nullptr, cfg); }) == Errc::InvalidArgument);
  const KnowledgeGraph small = synth_graph(1, 10, 3, 10, 5);
  CHECK(code_of([&] { train_model(ds, Arch::Gmemnn, &small, cfg); }) == Errc::ShapeMismatch);
  ds.train[0].x.pop_back();
  CHECK(code_of([&] { train_model(ds, Arch::Mlp, nullptr, cfg); }) == Errc::ShapeMismatch);
  ds.train.clear();
  CHECK(code_of([&] { train_model(ds, Arch::Mlp, nullptr, cfg); }) == Errc::InvalidArgument);
}

TEST_CASE("checkpoint files round trip") {
  TempDir dir;
  Fixture f;
  const Dataset ds = build_dataset(f.corpus, Task::Symptom, 2, 2, f.enc);
  TrainConfig cfg = TrainConfig::defaults(Arch::Gmemnn);
  cfg.epochs = 1;
  ModelOptions opts;
  opts.hidden = 8;
  opts.tie_disease_matrices = true;
  const TrainedModel tm = train_model(ds, Arch::Gmemnn, &f.kg, cfg, opts);
  save_trained(tm, dir / "m.json");
  const TrainedModel back = load_trained(dir / "m.json");
  CHECK(back.model.config == tm.model.config);
  CHECK(tensors_of(back.model) == tensors_of(tm.model));
  CHECK(back.history.size() == 1);
  CHECK(back.train_config.learning_rate == 0.035);
  CHECK(trained_to_json(back) == trained_to_json(tm));
  CHECK(code_of([&] { load_trained(dir / "missing.json"); }) == Errc::Io);
}

TEST_CASE("trial summaries") {
  const TrialReport same = summarize_trials({0.7, 0.7});
  CHECK(same.mean == doctest::Approx(0.7));
  CHECK(same.stdev == 0.0);
  const TrialReport r = summarize_trials({0.1, 0.2, 0.3, 0.6});
  CHECK(r.mean == doctest::Approx(0.3));
  // Sample standard deviation: sqrt(((.2)^2 + (.1)^2 + 0 + (.3)^2) / 3).
  CHECK(r.stdev == doctest::Approx(std::sqrt(0.14 / 3)));

  Fixture f;
  TrainConfig cfg = TrainConfig::defaults(Arch::Mlp);
  cfg.epochs = 1;
  const TrialReport a = run_trials(3, f.corpus, Arch::Mlp, Task::Action, nullptr, cfg, 4, f.enc, 5);
  const TrialReport b = run_trials(3, f.corpus, Arch::Mlp, Task::Action, nullptr, cfg, 4, f.enc, 5);
  CHECK(a.accuracies.size() == 3);
  CHECK(a.accuracies == b.accuracies);
  CHECK(a.stdev == b.stdev);
  CHECK(code_of([&] { run_trials(1, f.corpus, Arch::Mlp, Task::Action, nullptr, cfg, 4, f.enc, 5); }) ==
        Errc::InvalidArgument);
}
