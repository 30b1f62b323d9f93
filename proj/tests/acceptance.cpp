// One PASS/FAIL/SKIP line per acceptance criterion. Exits non-zero if any
// criterion fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "asd/corpus.hpp"
#include "asd/dialog_engine.hpp"
#include "asd/io.hpp"
#include "asd/kgraph.hpp"
#include "asd/simulate.hpp"
#include "asd/train.hpp"
#include "invariants.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace asd;
using namespace asd::test;
namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

struct Exec {
  int code;
  std::string out;
};

// Runs the CLI binary with the given arguments; stdout and stderr combined.
Exec asd_cli(const std::string& args) {
  const std::string cmd = std::string(ASD_CLI_PATH) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, "popen failed"};
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string must(const std::string& args) {
  const Exec e = asd_cli(args);
  if (e.code != 0) throw CliError("asd " + args + " exited " + std::to_string(e.code) + ": " + e.out);
  return e.out;
}

double hit_of(const std::string& eval_output) {
  const auto at = eval_output.find("hit ");
  if (at == std::string::npos) throw CliError("no hit rate in: " + eval_output);
  return std::stod(eval_output.substr(at + 4));
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// ---------------------------------------------------------------------------

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  Rng rng(2024);
  double worst = 0;
  std::string where;
  int instances = 0;
  for (int i = 0; i < 20; ++i) {
    const Task task = i % 2 ? Task::Action : Task::Symptom;
    const std::size_t ns = 2 + rng.below(5), in = 1 + rng.below(8), h = 1 + rng.below(8);
    const ModelConfig c = mlp_config(in, ns, h, task);
    Model m = Model::create(c, rng.next());
    randomize(m, rng);
    const GradStats st = gradient_check(m, nullptr, random_batch(1 + rng.below(4), in, c.out_dim(), rng));
    if (st.worst > worst) worst = st.worst, where = "mlp " + st.where;
    ++instances;
  }
  for (int i = 0; i < 20; ++i) {
    const Task task = i % 2 ? Task::Action : Task::Symptom;
    const std::size_t ns = 2 + rng.below(5), nd = 1 + rng.below(3), h = 1 + rng.below(8), in = 1 + rng.below(8);
    const KnowledgeGraph kg = random_graph(rng, ns, nd);
    ModelConfig c = gmemnn_config(in, ns, nd, h, task);
    c.tie_symptom_matrices = i % 3 == 1;
    c.tie_disease_matrices = i % 4 >= 2;
    Model m = Model::create(c, rng.next());
    randomize(m, rng);
    const GradStats st = gradient_check(m, &kg, random_batch(1 + rng.below(3), in, c.out_dim(), rng));
    if (st.worst > worst) worst = st.worst, where = "gmemnn " + st.where;
    ++instances;
  }
  const double secs = seconds_since(t0);
  const bool ok = worst < 1e-4 && secs < 60;
  return {ok ? Verdict::Pass : Verdict::Fail, std::to_string(instances) + " instances, worst relative error " +
                                                  sci(worst) + " at " + where + ", " + fmt(secs, 2) + " s"};
}

Outcome forward_oracle() {
  const HandSetInstance hs;
  const double dev = oracle_deviation(hs.params(), hs.config, hs.kg, hs.x);
  ModelConfig sym = hs.config;
  sym.task = Task::Symptom;
  const GmemnnTrace t = gmemnn_forward(hs.params(), sym, hs.kg, hs.x);
  const double hand = std::max({max_abs_diff(t.u0, Vec{2.85, -1.95}), max_abs_diff(t.attn_dis, Vec{1.0}),
                                max_abs_diff(t.u_d, Vec{2.45, 0.0})});
  const bool ok = dev <= 1e-12 && hand <= 1e-12;
  return {ok ? Verdict::Pass : Verdict::Fail,
          "max stage deviation " + sci(dev) + ", hand-derived stages " + sci(hand)};
}

Outcome simulation_exactness() {
  TempDir dir;
  must("synth-kg --out " + q(dir / "kg.json"));
  must("synth-corpus --kg " + q(dir / "kg.json") + " --goals 710 --out " + q(dir / "corpus.json"));
  const std::string act = must("gen-data --corpus " + q(dir / "corpus.json") + " --out " + q(dir / "act"));
  const std::string sym = must("gen-data --corpus " + q(dir / "corpus.json") + " --task symptom --out " + q(dir / "sym"));
  const json meta = json::parse(read_file(dir / "act" / "meta.json"));
  const Corpus corpus = load_corpus(dir / "corpus.json");
  std::size_t n_train = 0;
  for (const auto& g : corpus.goals) n_train += g.split == Split::Train;
  const bool sizes = n_train == 568 && corpus.goals.size() == 710 && act == "train 11360, test 2840\n" &&
                     sym == "train 5680, test 1420\n" && meta["train_size"] == 11360;

  // Property sweep over the corpus: 5000 symptom states and 5000 action states.
  const EncoderConfig cfg;
  std::size_t violations = 0;
  for (std::size_t k = 0; k < 10000; ++k) {
    const UserGoal& g = corpus.goals[k % corpus.goals.size()];
    Rng rng = example_rng(99, g, k);
    if (k % 2 == 0) {
      const SymptomExample ex = simulate_symptom_state(g, rng, cfg);
      const Census c = inspect(g, ex.state, cfg);
      violations += c.violations;
      violations += !(g.is_implicit(ex.label) && ex.state.slots[ex.label.value] == SlotStatus::NotQueried);
      violations += c.known_implicit >= g.implicit_symptoms.size();
    } else {
      const bool complete = k % 4 == 1;
      const ActionExample ex = simulate_action_state(g, rng, cfg, complete);
      const Census c = inspect(g, ex.state, cfg);
      violations += c.violations;
      violations += ex.conclude != complete;
      violations += (c.known_implicit == g.implicit_symptoms.size()) != complete;
    }
  }
  const bool ok = sizes && violations == 0;
  std::string detail = "goals " + std::to_string(corpus.goals.size()) + " (" + std::to_string(n_train) + "/" +
                       std::to_string(corpus.goals.size() - n_train) + "), action " + act.substr(0, act.size() - 1) +
                       ", symptom " + sym.substr(0, sym.size() - 1) + ", " + std::to_string(violations) +
                       " violations in 10000 samples";
  return {ok ? Verdict::Pass : Verdict::Fail, detail};
}

Outcome metric_oracle() {
  // Querying all 66 symptoms with the corpus-mean 3.26 implicit ones.
  const DialogMetrics e = compute_metrics(3.26, 3.26, 66 - 3.26, 66);
  const DialogMetrics d = compute_metrics(4, 2, 3, 5);
  const bool ru = std::round(e.unrelated_rate * 1e4) == 9506;
  const bool f1 = std::round(e.f1 * 1e4) == 945;
  const bool derived = std::abs(d.hit_rate - 0.5) < 1e-12 && std::abs(d.unrelated_rate - 0.6) < 1e-12 &&
                       std::abs(d.f1 - 0.4444) < 1e-4;
  std::string detail = "R_u " + fmt(100 * e.unrelated_rate) + "% (want 95.06), F1 " + fmt(100 * e.f1) +
                       "% (want 9.45), derived F1 " + fmt(d.f1);
  if (!f1) detail += "; 9.45% is not reachable from these counts: 2p/(1+p) with p = 3.26/66 is 9.4138%";
  return {ru && f1 && derived ? Verdict::Pass : Verdict::Fail, detail};
}

Outcome kg_statistics() {
  const Exec e = asd_cli("kg-stats --kg " + q(fs::path(ASD_SOURCE_DIR) / "data" / "kg.json"));
  const std::string want = "symptoms 66, diseases 28, sd 284, sc 810, total 1094\n";
  return {e.code == 0 && e.out == want ? Verdict::Pass : Verdict::Fail, e.out.substr(0, e.out.find('\n'))};
}

Outcome capacity() {
  const auto t0 = Clock::now();
  const KnowledgeGraph kg = synth_graph(7, 66, 28, 284, 810);
  const Corpus corpus = synth_corpus(7, 60, kg, 2.35, 3.26);
  Dataset ds;
  ds.task = Task::Action;
  for (std::size_t gi = 0; gi < 25; ++gi) {
    for (bool complete : {true, false}) {
      Rng rng = example_rng(1, corpus.goals[gi], complete);
      const ActionExample ex = simulate_action_state(corpus.goals[gi], rng, ds.encoder, complete);
      ds.train.push_back({vectorize(ex.state, ds.encoder), ex.conclude ? kConclude : kQuery});
    }
  }
  std::string detail = std::to_string(ds.train.size()) + " examples";
  bool ok = true;
  for (Arch arch : {Arch::Mlp, Arch::Gmemnn}) {
    TrainConfig cfg = TrainConfig::defaults(arch);
    cfg.epochs = 200;
    cfg.batch_size = 1;
    const TrainedModel tm = train_model(ds, arch, &kg, cfg);
    const double acc = evaluate_unit(tm.model, &kg, ds.train, ds.encoder);
    ok = ok && acc >= 0.99;
    detail += std::string(", ") + to_string(arch) + " " + fmt(100 * acc, 2) + "%";
  }
  const double secs = seconds_since(t0);
  detail += ", " + fmt(secs, 1) + " s";
  return {ok && secs < 120 ? Verdict::Pass : Verdict::Fail, detail};
}

Outcome end_to_end() {
  double hit_mlp = 0, hit_gm = 0, hit_rand = 0, slowest = 0;
  const auto t_all = Clock::now();
  const int n_seeds = 5;
  for (int s = 1; s <= n_seeds; ++s) {
    const auto t0 = Clock::now();
    TempDir dir;
    const std::string seed = " --seed " + std::to_string(s);
    const std::string kg = q(dir / "kg.json"), corpus = q(dir / "corpus.json");
    must("synth-kg" + seed + " --out " + kg);
    must("synth-corpus --kg " + kg + seed + " --out " + corpus);
    must("gen-data --corpus " + corpus + " --task action" + seed + " --out " + q(dir / "act"));
    must("gen-data --corpus " + corpus + " --task symptom" + seed + " --out " + q(dir / "sym"));
    for (const std::string arch : {"mlp", "gmemnn"}) {
      const std::string a = q(dir / ("a_" + arch + ".json")), y = q(dir / ("s_" + arch + ".json"));
      must("train --data " + q(dir / "act") + " --arch " + arch + " --kg " + kg + seed + " --out " + a);
      must("train --data " + q(dir / "sym") + " --arch " + arch + " --kg " + kg + seed + " --out " + y);
      const double h = hit_of(must("eval-dialog --action-model " + a + " --symptom-model " + y + " --kg " + kg +
                                   " --corpus " + corpus + " --tolr 10 --report " + q(dir / ("r_" + arch + ".json"))));
      (arch == "mlp" ? hit_mlp : hit_gm) += h / n_seeds;
    }
    hit_rand += hit_of(must("eval-dialog --policy random" + seed + " --corpus " + corpus + " --tolr 10 --report " +
                            q(dir / "r_random.json"))) /
                n_seeds;
    slowest = std::max(slowest, seconds_since(t0));
  }
  const bool ok = hit_mlp >= 0.4 && hit_gm >= 0.4 && hit_mlp > hit_rand && hit_gm > hit_rand && slowest < 600;
  return {ok ? Verdict::Pass : Verdict::Fail,
          "mean hit at TolR 10 over 5 seeds: mlp " + fmt(hit_mlp) + ", gmemnn " + fmt(hit_gm) + ", random " +
              fmt(hit_rand) + "; slowest pipeline " + fmt(slowest, 0) + " s, all seeds " +
              fmt(seconds_since(t_all), 0) + " s"};
}

Outcome muzhi() {
  const char* corpus_path = std::getenv("ASD_MUZHI_CORPUS");
  const char* kg_path = std::getenv("ASD_MUZHI_KG");
  if (!corpus_path || !kg_path) return {Verdict::Skip, "set ASD_MUZHI_CORPUS and ASD_MUZHI_KG to run"};
  const Corpus corpus = load_corpus(corpus_path);
  const KnowledgeGraph kg = load_graph(kg_path);
  EncoderConfig enc;
  enc.n_symptoms = corpus.symptoms.size();
  bool ok = true;
  std::ostringstream detail;
  // Unit accuracy, 5 trials each.
  const double want_acc[2][2] = {{0.9414, 0.4510}, {0.9450, 0.4788}};
  const double tol[2] = {0.015, 0.03};
  int ai = 0;
  for (Arch arch : {Arch::Mlp, Arch::Gmemnn}) {
    int ti = 0;
    for (Task task : {Task::Action, Task::Symptom}) {
      const TrialReport r = run_trials(5, corpus, arch, task, &kg, TrainConfig::defaults(arch),
                                       task == Task::Action ? 20 : 10, enc, 0);
      ok = ok && std::abs(r.mean - want_acc[ai][ti]) <= tol[ti];
      detail << to_string(arch) << "/" << to_string(task) << " " << fmt(100 * r.mean, 2) << "% ";
      ++ti;
    }
    ++ai;
  }
  // Conversational hit rates, 5 trials.
  const std::vector<UserGoal> test_goals = corpus.goals_in(Split::Test);
  const std::vector<int> tolrs{1, 5, 10, 20};
  const double want_hit[2] = {0.6326, 0.6730};
  double mean_hit[2] = {0, 0};
  ai = 0;
  for (Arch arch : {Arch::Mlp, Arch::Gmemnn}) {
    std::vector<double> curve(tolrs.size(), 0.0);
    for (std::uint64_t t = 0; t < 5; ++t) {
      auto models = std::array<std::shared_ptr<Model>, 2>{};
      int k = 0;
      for (Task task : {Task::Action, Task::Symptom}) {
        const Dataset ds = build_dataset(corpus, task, task == Task::Action ? 20 : 10, t, enc);
        TrainConfig cfg = TrainConfig::defaults(arch);
        cfg.seed = t;
        models[k++] = std::make_shared<Model>(train_model(ds, arch, &kg, cfg).model);
      }
      auto kgp = std::make_shared<KnowledgeGraph>(kg);
      const AgentFactory f = [&] { return std::make_unique<ModelAgent>(models[0], models[1], kgp); };
      const auto pts = tolr_sweep(f, test_goals, tolrs, enc.n_symptoms);
      for (std::size_t i = 0; i < pts.size(); ++i) curve[i] += pts[i].mean_hit_rate / 5;
    }
    mean_hit[ai] = curve[2];
    ok = ok && std::abs(curve[2] - want_hit[ai]) <= 0.04;
    ok = ok && curve[0] < curve[1] && curve[1] < curve[2];
    ok = ok && (curve[3] - curve[2]) < (curve[2] - curve[1]);
    detail << to_string(arch) << " hit@10 " << fmt(100 * curve[2], 2) << "% ";
    ++ai;
  }
  ok = ok && mean_hit[1] >= mean_hit[0];
  return {ok ? Verdict::Pass : Verdict::Fail, detail.str()};
}

Outcome determinism() {
  TempDir dir;
  const std::string kg = q(dir / "kg.json"), corpus = q(dir / "corpus.json");
  must("synth-kg --out " + kg);
  must("synth-corpus --kg " + kg + " --goals 120 --out " + corpus);
  must("gen-data --corpus " + corpus + " --out " + q(dir / "act"));
  must("gen-data --corpus " + corpus + " --task symptom --out " + q(dir / "sym"));
  for (const std::string arch : {"mlp", "gmemnn"}) {
    must("train --data " + q(dir / "act") + " --arch " + arch + " --kg " + kg + " --epochs 3 --seed 5 --out " +
         q(dir / ("a_" + arch + ".json")));
    must("train --data " + q(dir / "sym") + " --arch " + arch + " --kg " + kg + " --epochs 3 --seed 5 --out " +
         q(dir / ("s_" + arch + ".json")));
  }
  must("eval-dialog --action-model " + q(dir / "a_gmemnn.json") + " --symptom-model " + q(dir / "s_gmemnn.json") +
       " --kg " + kg + " --corpus " + corpus + " --report " + q(dir / "dialogs.json"));
  must("sweep-tolr --action-model " + q(dir / "a_mlp.json") + " --symptom-model " + q(dir / "s_mlp.json") +
       " --corpus " + corpus + " --tolr 1,5,10 --out " + q(dir / "sweep.csv"));
  must("trials --corpus " + corpus + " --n 2 --epochs 1 --per-goal 4 --report " + q(dir / "trials.json"));

  std::vector<fs::path> manifests;
  for (const auto& e : fs::recursive_directory_iterator(dir.path()))
    if (e.path().filename() == "manifest.json" || e.path().string().ends_with(".manifest.json"))
      manifests.push_back(e.path());
  std::size_t reproduced = 0, files = 0;
  std::string failures;
  for (const auto& m : manifests) {
    const Exec e = asd_cli("rerun --manifest " + q(m));
    if (e.code == 0) {
      ++reproduced;
      files += std::stoul(e.out.substr(e.out.find("reproduced ") + 11));
    } else {
      failures += " " + m.filename().string();
    }
  }
  const bool ok = reproduced == manifests.size() && manifests.size() == 11;
  return {ok ? Verdict::Pass : Verdict::Fail, std::to_string(reproduced) + "/" + std::to_string(manifests.size()) +
                                                  " manifests reproduced, " + std::to_string(files) +
                                                  " byte-identical files" + failures};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient correctness", gradient_correctness},
      {"forward oracle", forward_oracle},
      {"simulation exactness", simulation_exactness},
      {"metric oracle", metric_oracle},
      {"knowledge graph statistics", kg_statistics},
      {"capacity sanity", capacity},
      {"end-to-end synthetic pipeline", end_to_end},
      {"real-corpus reproduction", muzhi},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {Verdict::Fail, std::string("error: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    failed += o.verdict == Verdict::Fail;
    std::cout << tag << "  " << name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
