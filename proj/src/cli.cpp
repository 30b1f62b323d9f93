#include "asd/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "asd/checkpoint.hpp"
#include "asd/corpus.hpp"
#include "asd/dialog_engine.hpp"
#include "asd/error.hpp"
#include "asd/io.hpp"
#include "asd/kgraph.hpp"
#include "asd/service.hpp"
#include "asd/simulate.hpp"
#include "asd/train.hpp"
#include "asd/vocab.hpp"

namespace asd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Record of one artifact-producing run, written next to its output.
class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& args)
      : command_(std::move(command)), args_(args), start_(std::chrono::steady_clock::now()) {}

  void input(const fs::path& p) { inputs_[p.string()] = sha256_file(p); }
  void output(const fs::path& p) { outputs_.push_back(p); }
  json& config() { return config_; }
  json& seeds() { return seeds_; }

  void write(const fs::path& path) const {
    json outs = json::object();
    for (const auto& p : outputs_) {
      if (fs::is_directory(p)) {
        for (const auto& e : fs::directory_iterator(p))
          if (e.is_regular_file() && e.path().filename() != "manifest.json")
            outs[e.path().string()] = sha256_file(e.path());
      } else {
        outs[p.string()] = sha256_file(p);
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const json j{{"command", command_},
                 {"argv", args_},
                 {"cwd", fs::current_path().string()},
                 {"config", config_},
                 {"seeds", seeds_},
                 {"inputs", inputs_},
                 {"outputs", outs},
                 {"wall_clock_seconds", secs}};
    write_file(path, j.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::chrono::steady_clock::time_point start_;
  json config_ = json::object();
  json seeds_ = json::object();
  json inputs_ = json::object();
  std::vector<fs::path> outputs_;
};

fs::path manifest_for_file(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      fail(Errc::InvalidArgument, "bad integer list '" + s + "'");
    }
  }
  if (v.empty()) fail(Errc::InvalidArgument, "empty integer list");
  return v;
}

std::vector<UserGoal> goals_for_split(const Corpus& corpus, const std::string& split) {
  if (split == "all") return corpus.goals;
  if (split == "train") return corpus.goals_in(Split::Train);
  if (split == "test") return corpus.goals_in(Split::Test);
  fail(Errc::InvalidArgument, "split must be train, test or all");
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

struct DialogArgs {
  std::string action_model, symptom_model, kg, corpus, split = "test", policy = "model";
  std::uint64_t seed = 0, split_seed = 0;
};

void add_dialog_options(CLI::App* c, DialogArgs& a) {
  c->add_option("--action-model", a.action_model, "Trained action model");
  c->add_option("--symptom-model", a.symptom_model, "Trained symptom model");
  c->add_option("--kg", a.kg, "Knowledge graph (required for gmemnn models)");
  c->add_option("--corpus", a.corpus, "User-goal corpus")->required();
  c->add_option("--split", a.split, "Goals to converse with")->check(CLI::IsMember({"train", "test", "all"}));
  c->add_option("--split-seed", a.split_seed, "Seed for splitting goals without a split tag");
  c->add_option("--policy", a.policy, "model, or random (never concludes)")->check(CLI::IsMember({"model", "random"}));
  c->add_option("--seed", a.seed, "Seed for the random policy");
}

std::shared_ptr<const KnowledgeGraph> maybe_graph(const std::string& path, Manifest* m) {
  if (path.empty()) return nullptr;
  if (m) m->input(path);
  return std::make_shared<const KnowledgeGraph>(load_graph(path));
}

std::shared_ptr<const Model> load_model_for(const std::string& path, Task task, Manifest* m) {
  if (path.empty()) fail(Errc::InvalidArgument, std::string("--") + to_string(task) + "-model is required");
  if (m) m->input(path);
  auto model = std::make_shared<const Model>(load_trained(path).model);
  if (model->config.task != task)
    fail(Errc::InvalidArgument, path + " is a " + to_string(model->config.task) + " model");
  return model;
}

AgentFactory make_factory(const DialogArgs& a, Manifest* m) {
  if (a.policy == "random") {
    const std::uint64_t seed = a.seed;
    return [seed] { return std::make_unique<RandomAgent>(seed); };
  }
  auto action = load_model_for(a.action_model, Task::Action, m);
  auto symptom = load_model_for(a.symptom_model, Task::Symptom, m);
  auto kg = maybe_graph(a.kg, m);
  if (!kg && (action->config.arch == Arch::Gmemnn || symptom->config.arch == Arch::Gmemnn))
    fail(Errc::InvalidArgument, "--kg is required for gmemnn models");
  // Fail on shape mismatches before any dialog runs.
  ModelAgent probe(action, symptom, kg);
  return [action, symptom, kg] { return std::make_unique<ModelAgent>(action, symptom, kg); };
}

json dialog_config(const DialogArgs& a) {
  return {{"action_model", a.action_model}, {"symptom_model", a.symptom_model}, {"kg", a.kg},
          {"corpus", a.corpus},             {"split", a.split},                 {"split_seed", a.split_seed},
          {"policy", a.policy}};
}

int run_with(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run_with(args, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

namespace {

int run_with(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symptom-inquiry dialog agents: data, training, evaluation and serving"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every command");

  // synth-kg
  struct {
    std::uint64_t seed = 7;
    std::size_t symptoms = 66, diseases = 28, sd = 284, sc = 810;
    std::string out;
  } skg;
  auto* c_skg = app.add_subcommand("synth-kg", "Generate a random knowledge graph with exact edge counts");
  c_skg->add_option("--seed", skg.seed, "Random seed");
  c_skg->add_option("--symptoms", skg.symptoms, "Number of symptoms");
  c_skg->add_option("--diseases", skg.diseases, "Number of diseases");
  c_skg->add_option("--sd", skg.sd, "Symptom-disease edges");
  c_skg->add_option("--sc", skg.sc, "Symptom-symptom edges");
  c_skg->add_option("--out", skg.out, "Output graph JSON")->required();

  // kg-stats
  std::string stats_kg;
  auto* c_stats = app.add_subcommand("kg-stats", "Print knowledge-graph counts");
  c_stats->add_option("--kg", stats_kg, "Knowledge graph JSON")->required();

  // synth-corpus
  struct {
    std::string kg, out;
    std::size_t goals = 710;
    double mean_explicit = 2.35, mean_implicit = 3.26;
    std::uint64_t seed = 7;
    SynthOptions opts;
  } sc;
  auto* c_sc = app.add_subcommand("synth-corpus", "Generate a synthetic user-goal corpus from a graph");
  c_sc->add_option("--kg", sc.kg, "Knowledge graph JSON")->required();
  c_sc->add_option("--goals", sc.goals, "Number of user goals");
  c_sc->add_option("--mean-explicit", sc.mean_explicit, "Mean explicit symptoms per goal");
  c_sc->add_option("--mean-implicit", sc.mean_implicit, "Mean implicit symptoms per goal");
  c_sc->add_option("--neighborhood-bias", sc.opts.neighborhood_bias, "Chance a symptom comes from the disease neighborhood");
  c_sc->add_option("--prevalence-skew", sc.opts.prevalence_skew, "Zipf exponent of per-disease symptom prevalence");
  c_sc->add_option("--explicit-present", sc.opts.explicit_present, "Chance an explicit symptom is present");
  c_sc->add_option("--implicit-present", sc.opts.implicit_present, "Chance an implicit symptom is present");
  c_sc->add_option("--seed", sc.seed, "Random seed");
  c_sc->add_option("--out", sc.out, "Output corpus JSON")->required();

  // gen-data
  struct {
    std::string corpus, task = "action", out;
    std::optional<std::size_t> per_goal;
    std::uint64_t seed = 0, split_seed = 0;
    int tmax = 20;
  } gd;
  auto* c_gd = app.add_subcommand("gen-data", "Simulate labeled dialog states from a corpus");
  c_gd->add_option("--corpus", gd.corpus, "User-goal corpus")->required();
  c_gd->add_option("--task", gd.task, "action or symptom")->check(CLI::IsMember({"action", "symptom"}));
  c_gd->add_option("--per-goal", gd.per_goal, "Examples per goal (default 20 for action, 10 for symptom)");
  c_gd->add_option("--seed", gd.seed, "Random seed");
  c_gd->add_option("--split-seed", gd.split_seed, "Seed for splitting goals without a split tag");
  c_gd->add_option("--tmax", gd.tmax, "Largest encoded turn count");
  c_gd->add_option("--out", gd.out, "Output dataset directory")->required();

  // train
  struct {
    std::string data, arch = "mlp", task, kg, out;
    std::optional<double> lr;
    double wd = 0.001;
    int epochs = 40;
    std::size_t batch = 32;
    std::uint64_t seed = 0;
    ModelOptions mo;
  } tr;
  auto* c_tr = app.add_subcommand("train", "Train an action or symptom model");
  c_tr->add_option("--data", tr.data, "Dataset directory")->required();
  c_tr->add_option("--arch", tr.arch, "mlp or gmemnn")->check(CLI::IsMember({"mlp", "gmemnn"}));
  c_tr->add_option("--task", tr.task, "action or symptom; must match the dataset (default: the dataset's)")
      ->check(CLI::IsMember({"action", "symptom"}));
  c_tr->add_option("--kg", tr.kg, "Knowledge graph (required for gmemnn)");
  c_tr->add_option("--lr", tr.lr, "Learning rate (default 0.025 for mlp, 0.035 for gmemnn)");
  c_tr->add_option("--wd", tr.wd, "Weight decay");
  c_tr->add_option("--epochs", tr.epochs, "Training epochs");
  c_tr->add_option("--batch", tr.batch, "Mini-batch size");
  c_tr->add_option("--seed", tr.seed, "Random seed for init and shuffling");
  c_tr->add_option("--hidden", tr.mo.hidden, "Hidden size (0 = architecture default)");
  c_tr->add_flag("--tie-symptom", tr.mo.tie_symptom_matrices, "Share the symptom memory matrices");
  c_tr->add_flag("--tie-disease", tr.mo.tie_disease_matrices, "Share the disease memory matrices");
  c_tr->add_option("--out", tr.out, "Output model JSON")->required();

  // eval-unit
  struct {
    std::string model, data, kg, split = "test";
  } eu;
  auto* c_eu = app.add_subcommand("eval-unit", "Accuracy of a model on a dataset split");
  c_eu->add_option("--model", eu.model, "Trained model JSON")->required();
  c_eu->add_option("--data", eu.data, "Dataset directory")->required();
  c_eu->add_option("--kg", eu.kg, "Knowledge graph (required for gmemnn)");
  c_eu->add_option("--split", eu.split, "train or test")->check(CLI::IsMember({"train", "test"}));

  // eval-dialog
  DialogArgs ed;
  int ed_tolr = 10;
  std::string ed_report;
  auto* c_ed = app.add_subcommand("eval-dialog", "Run simulated conversations and report Hit/UnRel/F1");
  add_dialog_options(c_ed, ed);
  c_ed->add_option("--tolr", ed_tolr, "Maximum symptom queries per conversation");
  c_ed->add_option("--report", ed_report, "Output report JSON")->required();

  // sweep-tolr
  DialogArgs sw;
  std::string sw_tolr = "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22", sw_out;
  auto* c_sw = app.add_subcommand("sweep-tolr", "Conversational metrics over a range of TolR values");
  add_dialog_options(c_sw, sw);
  c_sw->add_option("--tolr", sw_tolr, "Comma-separated TolR values");
  c_sw->add_option("--out", sw_out, "Output CSV")->required();

  // trials
  struct {
    std::string corpus, arch = "mlp", task = "action", kg, report;
    std::size_t n = 5;
    std::optional<std::size_t> per_goal;
    std::optional<double> lr;
    double wd = 0.001;
    int epochs = 40, tmax = 20;
    std::size_t batch = 32;
    std::uint64_t seed = 0, split_seed = 0;
  } tl;
  auto* c_tl = app.add_subcommand("trials", "Repeat data generation and training, report mean and stdev accuracy");
  c_tl->add_option("--corpus", tl.corpus, "User-goal corpus")->required();
  c_tl->add_option("--arch", tl.arch, "mlp or gmemnn")->check(CLI::IsMember({"mlp", "gmemnn"}));
  c_tl->add_option("--task", tl.task, "action or symptom")->check(CLI::IsMember({"action", "symptom"}));
  c_tl->add_option("--kg", tl.kg, "Knowledge graph (required for gmemnn)");
  c_tl->add_option("--n", tl.n, "Number of trials");
  c_tl->add_option("--per-goal", tl.per_goal, "Examples per goal (default 20 for action, 10 for symptom)");
  c_tl->add_option("--lr", tl.lr, "Learning rate (default 0.025 for mlp, 0.035 for gmemnn)");
  c_tl->add_option("--wd", tl.wd, "Weight decay");
  c_tl->add_option("--epochs", tl.epochs, "Training epochs");
  c_tl->add_option("--batch", tl.batch, "Mini-batch size");
  c_tl->add_option("--tmax", tl.tmax, "Largest encoded turn count");
  c_tl->add_option("--seed", tl.seed, "Base seed");
  c_tl->add_option("--split-seed", tl.split_seed, "Seed for splitting goals without a split tag");
  c_tl->add_option("--report", tl.report, "Output report JSON")->required();

  // serve
  struct {
    std::string action_model, symptom_model, kg, host = "127.0.0.1", cors = "*";
    int port = 8080, tolr = 10, idle_minutes = 30;
  } sv;
  auto* c_sv = app.add_subcommand("serve", "HTTP service for live dialogs");
  c_sv->add_option("--action-model", sv.action_model, "Trained action model")->required();
  c_sv->add_option("--symptom-model", sv.symptom_model, "Trained symptom model")->required();
  c_sv->add_option("--kg", sv.kg, "Knowledge graph (required for gmemnn models)");
  c_sv->add_option("--host", sv.host, "Listen address");
  c_sv->add_option("--port", sv.port, "Listen port");
  c_sv->add_option("--tolr", sv.tolr, "Maximum symptom queries per session");
  c_sv->add_option("--idle-minutes", sv.idle_minutes, "Idle session expiry");
  c_sv->add_option("--cors-origin", sv.cors, "Allowed browser origin");

  // rerun
  std::string rr_manifest;
  auto* c_rr = app.add_subcommand("rerun", "Re-execute a manifest and check its outputs are byte-identical");
  c_rr->add_option("--manifest", rr_manifest, "Manifest JSON")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : 1;
  }

  if (c_skg->parsed()) {
    Manifest m("synth-kg", args);
    m.config() = {{"symptoms", skg.symptoms}, {"diseases", skg.diseases}, {"sd", skg.sd}, {"sc", skg.sc}};
    m.seeds()["seed"] = skg.seed;
    const KnowledgeGraph kg = synth_graph(skg.seed, skg.symptoms, skg.diseases, skg.sd, skg.sc);
    save_graph(kg, skg.out);
    m.output(skg.out);
    m.write(manifest_for_file(skg.out));
    out << kg.stats().summary() << "\n";
    return 0;
  }

  if (c_stats->parsed()) {
    out << load_graph(stats_kg).stats().summary() << "\n";
    return 0;
  }

  if (c_sc->parsed()) {
    Manifest m("synth-corpus", args);
    m.input(sc.kg);
    m.config() = {{"kg", sc.kg},
                  {"goals", sc.goals},
                  {"mean_explicit", sc.mean_explicit},
                  {"mean_implicit", sc.mean_implicit},
                  {"neighborhood_bias", sc.opts.neighborhood_bias},
                  {"prevalence_skew", sc.opts.prevalence_skew},
                  {"explicit_present", sc.opts.explicit_present},
                  {"implicit_present", sc.opts.implicit_present}};
    m.seeds()["seed"] = sc.seed;
    const Corpus corpus = synth_corpus(sc.seed, sc.goals, load_graph(sc.kg), sc.mean_explicit, sc.mean_implicit, sc.opts);
    save_corpus(corpus, sc.out);
    m.output(sc.out);
    m.write(manifest_for_file(sc.out));
    const CorpusStats st = corpus_stats(corpus);
    out << "goals " << st.goals << ", train " << st.train << ", test " << st.test << ", mean explicit "
        << fixed(st.mean_explicit, 2) << ", mean implicit " << fixed(st.mean_implicit, 2) << "\n";
    return 0;
  }

  if (c_gd->parsed()) {
    const Task task = parse_task(gd.task);
    const std::size_t per_goal = gd.per_goal.value_or(task == Task::Action ? 20 : 10);
    EncoderConfig enc;
    enc.t_max = gd.tmax;
    Manifest m("gen-data", args);
    m.input(gd.corpus);
    const Corpus corpus = load_corpus(gd.corpus, gd.split_seed);
    enc.n_symptoms = corpus.symptoms.size();
    m.config() = {{"corpus", gd.corpus}, {"task", gd.task}, {"per_goal", per_goal}, {"tmax", gd.tmax}};
    m.seeds() = {{"seed", gd.seed}, {"split_seed", gd.split_seed}};
    const Dataset ds = build_dataset(corpus, task, per_goal, gd.seed, enc);
    save_dataset(ds, gd.out);
    m.output(gd.out);
    m.write(fs::path(gd.out) / "manifest.json");
    out << "train " << ds.train.size() << ", test " << ds.test.size() << "\n";
    return 0;
  }

  if (c_tr->parsed()) {
    const Arch arch = parse_arch(tr.arch);
    TrainConfig cfg = TrainConfig::defaults(arch);
    if (tr.lr) cfg.learning_rate = *tr.lr;
    cfg.weight_decay = tr.wd;
    cfg.epochs = tr.epochs;
    cfg.batch_size = tr.batch;
    cfg.seed = tr.seed;
    cfg.check();
    Manifest m("train", args);
    m.input(fs::path(tr.data) / "meta.json");
    m.input(fs::path(tr.data) / "train.jsonl");
    m.input(fs::path(tr.data) / "test.jsonl");
    const Dataset ds = load_dataset(tr.data);
    if (!tr.task.empty() && parse_task(tr.task) != ds.task)
      fail(Errc::InvalidArgument, "--task " + tr.task + " does not match the dataset's task");
    auto kg = maybe_graph(tr.kg, &m);
    if (arch == Arch::Gmemnn && !kg) fail(Errc::InvalidArgument, "--kg is required for gmemnn");
    m.config() = {{"data", tr.data},
                  {"arch", tr.arch},
                  {"task", to_string(ds.task)},
                  {"kg", tr.kg},
                  {"lr", cfg.learning_rate},
                  {"wd", cfg.weight_decay},
                  {"epochs", cfg.epochs},
                  {"batch", cfg.batch_size},
                  {"hidden", tr.mo.hidden},
                  {"tie_symptom", tr.mo.tie_symptom_matrices},
                  {"tie_disease", tr.mo.tie_disease_matrices}};
    m.seeds()["seed"] = tr.seed;
    const TrainedModel tm = train_model(ds, arch, arch == Arch::Gmemnn ? kg.get() : nullptr, cfg, tr.mo);
    save_trained(tm, tr.out);
    m.output(tr.out);
    m.write(manifest_for_file(tr.out));
    const EpochRecord& last = tm.history.back();
    out << "epochs " << tm.history.size() << ", loss " << fixed(last.loss) << ", test accuracy "
        << fixed(last.test_accuracy) << "\n";
    return 0;
  }

  if (c_eu->parsed()) {
    const TrainedModel tm = load_trained(eu.model);
    const Dataset ds = load_dataset(eu.data);
    if (tm.model.config.task != ds.task) fail(Errc::InvalidArgument, "model and dataset tasks differ");
    auto kg = maybe_graph(eu.kg, nullptr);
    if (tm.model.config.arch == Arch::Gmemnn && !kg) fail(Errc::InvalidArgument, "--kg is required for gmemnn");
    const auto& split = eu.split == "train" ? ds.train : ds.test;
    out << "accuracy " << fixed(evaluate_unit(tm.model, kg.get(), split, ds.encoder)) << " (" << split.size()
        << " examples)\n";
    return 0;
  }

  if (c_ed->parsed()) {
    Manifest m("eval-dialog", args);
    AgentFactory factory = make_factory(ed, &m);
    m.input(ed.corpus);
    const Corpus corpus = load_corpus(ed.corpus, ed.split_seed);
    const auto goals = goals_for_split(corpus, ed.split);
    m.config() = dialog_config(ed);
    m.config()["tolr"] = ed_tolr;
    m.seeds() = {{"seed", ed.seed}, {"split_seed", ed.split_seed}};
    auto agent = factory();
    const ConversationReport rep = evaluate_conversational(*agent, goals, ed_tolr, corpus.symptoms.size());
    write_file(ed_report, report_to_json(rep, corpus.symptoms));
    m.output(ed_report);
    m.write(manifest_for_file(ed_report));
    out << "conversations " << rep.conversations.size() << ", hit " << fixed(rep.mean.hit_rate) << ", unrelated "
        << fixed(rep.mean.unrelated_rate) << ", f1 " << fixed(rep.mean.f1) << "\n";
    return 0;
  }

  if (c_sw->parsed()) {
    const std::vector<int> tolrs = parse_int_list(sw_tolr);
    Manifest m("sweep-tolr", args);
    AgentFactory factory = make_factory(sw, &m);
    m.input(sw.corpus);
    const Corpus corpus = load_corpus(sw.corpus, sw.split_seed);
    const auto goals = goals_for_split(corpus, sw.split);
    m.config() = dialog_config(sw);
    m.config()["tolr"] = tolrs;
    m.seeds() = {{"seed", sw.seed}, {"split_seed", sw.split_seed}};
    const auto curve = tolr_sweep(factory, goals, tolrs, corpus.symptoms.size());
    write_file(sw_out, sweep_to_csv(curve));
    m.output(sw_out);
    m.write(manifest_for_file(sw_out));
    out << sweep_to_table(curve);
    return 0;
  }

  if (c_tl->parsed()) {
    const Arch arch = parse_arch(tl.arch);
    const Task task = parse_task(tl.task);
    TrainConfig cfg = TrainConfig::defaults(arch);
    if (tl.lr) cfg.learning_rate = *tl.lr;
    cfg.weight_decay = tl.wd;
    cfg.epochs = tl.epochs;
    cfg.batch_size = tl.batch;
    cfg.check();
    const std::size_t per_goal = tl.per_goal.value_or(task == Task::Action ? 20 : 10);
    Manifest m("trials", args);
    m.input(tl.corpus);
    const Corpus corpus = load_corpus(tl.corpus, tl.split_seed);
    auto kg = maybe_graph(tl.kg, &m);
    if (arch == Arch::Gmemnn && !kg) fail(Errc::InvalidArgument, "--kg is required for gmemnn");
    EncoderConfig enc;
    enc.t_max = tl.tmax;
    enc.n_symptoms = corpus.symptoms.size();
    m.config() = {{"corpus", tl.corpus}, {"arch", tl.arch},  {"task", tl.task},         {"kg", tl.kg},
                  {"n", tl.n},           {"per_goal", per_goal}, {"lr", cfg.learning_rate}, {"wd", cfg.weight_decay},
                  {"epochs", cfg.epochs}, {"batch", cfg.batch_size}, {"tmax", tl.tmax}};
    m.seeds() = {{"seed", tl.seed}, {"split_seed", tl.split_seed}};
    const TrialReport rep = run_trials(tl.n, corpus, arch, task, kg.get(), cfg, per_goal, enc, tl.seed);
    const json j{{"arch", tl.arch}, {"task", tl.task}, {"accuracies", rep.accuracies}, {"mean", rep.mean},
                 {"stdev", rep.stdev}};
    write_file(tl.report, j.dump(2) + "\n");
    m.output(tl.report);
    m.write(manifest_for_file(tl.report));
    out << "mean " << fixed(rep.mean) << ", stdev " << fixed(rep.stdev) << " over " << rep.accuracies.size()
        << " trials\n";
    return 0;
  }

  if (c_sv->parsed()) {
    DialogArgs a;
    a.action_model = sv.action_model;
    a.symptom_model = sv.symptom_model;
    a.kg = sv.kg;
    AgentFactory factory = make_factory(a, nullptr);
    const std::size_t n_sym = load_trained(sv.action_model).model.config.n_symptoms;
    std::vector<std::string> names = symptom_names(n_sym);
    if (!sv.kg.empty()) names = load_graph(sv.kg).symptoms();
    SessionManager::Options opts;
    opts.tolr = sv.tolr;
    opts.idle_expiry = std::chrono::minutes(sv.idle_minutes);
    SessionManager manager(std::move(names), factory, opts);
    httplib::Server server;
    mount_routes(server, manager, sv.cors);
    out << "listening on " << sv.host << ":" << sv.port << std::endl;
    if (!server.listen(sv.host, sv.port)) fail(Errc::Io, "cannot listen on " + sv.host + ":" + std::to_string(sv.port));
    return 0;
  }

  if (c_rr->parsed()) {
    const json m = json::parse(read_file(rr_manifest));
    // Recorded paths are relative to the recorded working directory.
    struct CwdGuard {
      fs::path saved = fs::current_path();
      ~CwdGuard() { fs::current_path(saved); }
    } guard;
    fs::current_path(m.at("cwd").get<std::string>());
    for (const auto& [path, digest] : m.at("inputs").items())
      if (sha256_file(path) != digest.get<std::string>()) fail(Errc::InvalidArgument, "input changed: " + path);
    std::ostringstream sink;
    const int code = run_cli(m.at("argv").get<std::vector<std::string>>(), sink, err);
    if (code != 0) return code;
    std::size_t n = 0;
    for (const auto& [path, digest] : m.at("outputs").items()) {
      if (sha256_file(path) != digest.get<std::string>()) {
        err << "error: output differs: " << path << "\n";
        return 1;
      }
      ++n;
    }
    out << "reproduced " << n << " output file(s)\n";
    return 0;
  }
  return 1;
}

}  // namespace

}  // namespace asd
