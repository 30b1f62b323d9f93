#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "asd/cli.hpp"
#include "asd/io.hpp"
#include "support.hpp"

using asd::test::TempDir;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "asd");
  std::ostringstream out, err;
  const int code = asd::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

json read_json(const std::filesystem::path& p) { return json::parse(asd::read_file(p)); }

// Graph, corpus and action data shared by the cases below.
struct Pipeline {
  TempDir dir;
  std::string kg = (dir / "kg.json").string();
  std::string corpus = (dir / "corpus.json").string();
  std::string act = (dir / "act").string();
  std::string sym = (dir / "sym").string();
  Pipeline() {
    REQUIRE(cli({"synth-kg", "--out", kg}).code == 0);
    REQUIRE(cli({"synth-corpus", "--kg", kg, "--goals", "50", "--out", corpus}).code == 0);
    REQUIRE(cli({"gen-data", "--corpus", corpus, "--out", act}).code == 0);
    REQUIRE(cli({"gen-data", "--corpus", corpus, "--task", "symptom", "--per-goal", "4", "--out", sym}).code == 0);
  }
};

}  // namespace

TEST_CASE("help shows defaults") {
  const Run r = cli({"train", "--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("--wd FLOAT [0.001]") != std::string::npos);
  CHECK(r.out.find("--epochs INT [40]") != std::string::npos);
  CHECK(r.out.find("--batch UINT [32]") != std::string::npos);
  CHECK(r.out.find("0.025 for mlp, 0.035 for gmemnn") != std::string::npos);
  const Run top = cli({"--help"});
  CHECK(top.code == 0);
  for (const char* sub : {"synth-kg", "kg-stats", "synth-corpus", "gen-data", "train", "eval-unit", "eval-dialog",
                          "sweep-tolr", "trials", "serve", "rerun"})
    CHECK(top.out.find(sub) != std::string::npos);
  CHECK(cli({"eval-dialog", "--help"}).out.find("--tolr INT [10]") != std::string::npos);
}

TEST_CASE("exit codes") {
  TempDir dir;
  CHECK(cli({}).code == 1);
  CHECK(cli({"no-such-command"}).code == 1);
  CHECK(cli({"kg-stats"}).code == 1);
  const Run missing = cli({"kg-stats", "--kg", (dir / "absent.json").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("error") != std::string::npos);
  asd::write_file(dir / "bad.json", "{not json");
  CHECK(cli({"kg-stats", "--kg", (dir / "bad.json").string()}).code == 1);
  CHECK(cli({"synth-kg", "--symptoms", "4", "--diseases", "2", "--sd", "1", "--out", (dir / "k.json").string()}).code == 1);
}

TEST_CASE("graph statistics") {
  TempDir dir;
  const std::string kg = (dir / "kg.json").string();
  const Run gen = cli({"synth-kg", "--out", kg});
  CHECK(gen.code == 0);
  const Run stats = cli({"kg-stats", "--kg", kg});
  CHECK(stats.code == 0);
  CHECK(stats.out == "symptoms 66, diseases 28, sd 284, sc 810, total 1094\n");
  CHECK(cli({"kg-stats", "--kg", ASD_SOURCE_DIR "/data/kg.json"}).out == stats.out);
  const json m = read_json(kg + ".manifest.json");
  CHECK(m["command"] == "synth-kg");
  CHECK(m["seeds"]["seed"] == 7);
  CHECK(m["outputs"].size() == 1);
}

TEST_CASE("data generation and training") {
  Pipeline p;
  CHECK(read_json(p.corpus)["goals"].size() == 50);
  CHECK(read_json(std::filesystem::path(p.act) / "meta.json")["train_size"] == 800);
  CHECK(read_json(std::filesystem::path(p.act) / "meta.json")["test_size"] == 200);
  const Run again = cli({"gen-data", "--corpus", p.corpus, "--out", (p.dir / "act2").string()});
  CHECK(again.out == "train 800, test 200\n");
  CHECK(asd::read_file(p.dir / "act2" / "train.jsonl") == asd::read_file(std::filesystem::path(p.act) / "train.jsonl"));

  const std::string mlp = (p.dir / "mlp.json").string();
  const Run t = cli({"train", "--data", p.act, "--epochs", "2", "--out", mlp});
  CHECK(t.code == 0);
  CHECK(t.out.rfind("epochs 2, loss ", 0) == 0);
  CHECK(read_json(mlp + ".manifest.json")["config"]["lr"] == 0.025);
  const std::string gm = (p.dir / "gm.json").string();
  CHECK(cli({"train", "--data", p.act, "--arch", "gmemnn", "--kg", p.kg, "--epochs", "1", "--out", gm}).code == 0);
  CHECK(read_json(gm + ".manifest.json")["config"]["lr"] == 0.035);
  CHECK(read_json(gm + ".manifest.json")["inputs"].contains(p.kg));

  CHECK(cli({"train", "--data", p.act, "--arch", "gmemnn", "--out", gm}).code == 1);
  CHECK(cli({"train", "--data", p.act, "--task", "symptom", "--out", mlp}).code == 1);
  CHECK(cli({"train", "--data", p.act, "--lr", "1e200", "--epochs", "3", "--out", (p.dir / "x.json").string()}).code == 3);

  const Run ev = cli({"eval-unit", "--model", mlp, "--data", p.act});
  CHECK(ev.code == 0);
  CHECK(ev.out.find("(200 examples)") != std::string::npos);

  const std::string smlp = (p.dir / "smlp.json").string();
  REQUIRE(cli({"train", "--data", p.sym, "--epochs", "1", "--out", smlp}).code == 0);
  const std::string report = (p.dir / "dialogs.json").string();
  const Run d = cli({"eval-dialog", "--action-model", mlp, "--symptom-model", smlp, "--corpus", p.corpus, "--report", report});
  CHECK(d.code == 0);
  CHECK(d.out.rfind("conversations 10, hit ", 0) == 0);
  CHECK(read_json(report)["tolr"] == 10);
  CHECK(cli({"eval-dialog", "--action-model", smlp, "--symptom-model", mlp, "--corpus", p.corpus, "--report", report}).code == 1);

  const Run rnd = cli({"eval-dialog", "--policy", "random", "--tolr", "66", "--corpus", p.corpus, "--report", report});
  CHECK(rnd.code == 0);
  CHECK(rnd.out.find("hit 1.0000") != std::string::npos);

  const std::string csv = (p.dir / "sweep.csv").string();
  const Run sw = cli({"sweep-tolr", "--policy", "random", "--tolr", "1,5,10", "--corpus", p.corpus, "--out", csv});
  CHECK(sw.code == 0);
  CHECK(asd::read_file(csv).rfind("tolr,mean_hit_rate", 0) == 0);

  const std::string trials = (p.dir / "trials.json").string();
  const Run tr = cli({"trials", "--corpus", p.corpus, "--n", "2", "--per-goal", "4", "--epochs", "1", "--report", trials});
  CHECK(tr.code == 0);
  CHECK(read_json(trials)["accuracies"].size() == 2);
}

TEST_CASE("rerun reproduces outputs byte for byte") {
  Pipeline p;
  const std::string gm = (p.dir / "gm.json").string();
  REQUIRE(cli({"train", "--data", p.act, "--arch", "gmemnn", "--kg", p.kg, "--epochs", "1", "--seed", "3", "--out", gm}).code == 0);
  const std::string before = asd::read_file(gm);
  for (const std::string& m : {p.kg + ".manifest.json", p.corpus + ".manifest.json", p.act + "/manifest.json", gm + ".manifest.json"}) {
    const Run r = cli({"rerun", "--manifest", m});
    INFO(m << ": " << r.err);
    CHECK(r.code == 0);
    CHECK(r.out.find("reproduced") != std::string::npos);
  }
  CHECK(asd::read_file(gm) == before);
  CHECK(cli({"rerun", "--manifest", p.act + "/manifest.json"}).out == "reproduced 3 output file(s)\n");

  // A recorded digest that no longer matches is reported.
  json m = read_json(gm + ".manifest.json");
  m["outputs"][gm] = std::string(64, '0');
  asd::write_file(p.dir / "tampered.json", m.dump());
  const Run bad = cli({"rerun", "--manifest", (p.dir / "tampered.json").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("output differs") != std::string::npos);

  // So is a changed input.
  asd::write_file(p.dir / "act" / "test.jsonl", "");
  CHECK(cli({"rerun", "--manifest", gm + ".manifest.json"}).code == 1);
}
