#include "asd/simulate.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "asd/error.hpp"
#include "asd/io.hpp"

namespace asd {

using nlohmann::json;

namespace {

std::vector<SymptomId> ids_of(const std::vector<SymptomAssignment>& set) {
  std::vector<SymptomId> out;
  for (const auto& a : set) out.push_back(a.symptom);
  return out;
}

std::vector<SymptomId> unrelated_pool(const UserGoal& goal, std::size_t n_symptoms) {
  std::vector<bool> used(n_symptoms, false);
  for (const auto& a : goal.explicit_symptoms) used[a.symptom.value] = true;
  for (const auto& a : goal.implicit_symptoms) used[a.symptom.value] = true;
  std::vector<SymptomId> out;
  for (std::size_t s = 0; s < n_symptoms; ++s)
    if (!used[s]) out.emplace_back(s);
  return out;
}

void check_goal(const UserGoal& goal, const EncoderConfig& cfg) {
  cfg.check();
  if (goal.implicit_symptoms.empty()) fail(Errc::EmptyImplicitSet, "goal " + goal.id + " has no implicit symptoms");
}

// Draws n_u uniformly in [0, budget) and samples that many unrelated symptoms.
std::vector<SymptomId> draw_unrelated(const UserGoal& goal, Rng& rng, const EncoderConfig& cfg, int budget) {
  if (budget <= 0) return {};
  const std::size_t n_u = rng.below(static_cast<std::size_t>(budget));
  auto pool = unrelated_pool(goal, cfg.n_symptoms);
  return rng.sample(pool, std::min(n_u, pool.size()));
}

}  // namespace

DialogState compose_state(const UserGoal& goal, std::span<const SymptomId> known_implicit,
                          std::span<const SymptomId> unrelated, Rng& rng, const EncoderConfig& cfg) {
  DialogState st = DialogState::initial(goal.explicit_symptoms, cfg.n_symptoms);
  for (SymptomId s : known_implicit) {
    auto truth = goal.lookup(s);
    if (!truth || !goal.is_implicit(s)) fail(Errc::InvalidArgument, "known_implicit contains a non-implicit symptom");
    st.slots[s.value] = *truth ? SlotStatus::Confirmed : SlotStatus::Denied;
  }
  for (SymptomId s : unrelated) {
    if (goal.lookup(s)) fail(Errc::InvalidArgument, "unrelated set contains a goal symptom");
    st.slots[s.value] = SlotStatus::Unrelated;
  }
  st.num_turns = static_cast<int>(known_implicit.size() + unrelated.size());
  st.agent_action = st.num_turns == 0 ? AgentAction::Initiate : AgentAction::Request;
  if (st.num_turns == 0) {
    st.user_action = UserAction::SelfReport;
  } else {
    const std::size_t pick = rng.below(static_cast<std::size_t>(st.num_turns));
    if (pick >= known_implicit.size()) {
      st.user_action = UserAction::NotSure;
    } else {
      st.user_action = *goal.lookup(known_implicit[pick]) ? UserAction::Confirm : UserAction::Deny;
    }
  }
  return st;
}

SymptomExample simulate_symptom_state(const UserGoal& goal, Rng& rng, const EncoderConfig& cfg) {
  check_goal(goal, cfg);
  const std::size_t n_i = goal.implicit_symptoms.size();
  // n_i' in [0, n_i), additionally kept below t_max so a slot is left for the
  // unrelated draw and the turn count stays encodable.
  const std::size_t n_known = rng.below(std::min(n_i, static_cast<std::size_t>(cfg.t_max)));
  const auto known = rng.sample(ids_of(goal.implicit_symptoms), n_known);
  const auto unrelated = draw_unrelated(goal, rng, cfg, cfg.t_max - static_cast<int>(n_known));
  SymptomExample ex;
  ex.state = compose_state(goal, known, unrelated, rng, cfg);
  std::vector<SymptomId> hidden;
  for (const auto& a : goal.implicit_symptoms)
    if (std::find(known.begin(), known.end(), a.symptom) == known.end()) hidden.push_back(a.symptom);
  ex.label = hidden[rng.below(hidden.size())];
  return ex;
}

ActionExample simulate_action_state(const UserGoal& goal, Rng& rng, const EncoderConfig& cfg, bool complete) {
  check_goal(goal, cfg);
  const std::size_t n_i = goal.implicit_symptoms.size();
  std::vector<SymptomId> known;
  if (complete) {
    if (n_i > static_cast<std::size_t>(cfg.t_max)) {
      fail(Errc::TurnOverflow, "goal " + goal.id + " has more implicit symptoms than t_max allows");
    }
    known = ids_of(goal.implicit_symptoms);
  } else {
    const std::size_t n_known = rng.below(std::min(n_i, static_cast<std::size_t>(cfg.t_max)));
    known = rng.sample(ids_of(goal.implicit_symptoms), n_known);
  }
  const auto unrelated = draw_unrelated(goal, rng, cfg, cfg.t_max - static_cast<int>(known.size()));
  ActionExample ex;
  ex.state = compose_state(goal, known, unrelated, rng, cfg);
  ex.conclude = complete;
  return ex;
}

Rng example_rng(std::uint64_t seed, const UserGoal& goal, std::size_t ordinal) {
  return Rng(mix_seed(seed, hash_string(goal.id), ordinal));
}

Dataset build_dataset(const Corpus& corpus, Task task, std::size_t per_goal, std::uint64_t seed, const EncoderConfig& cfg) {
  if (per_goal < 1) fail(Errc::InvalidArgument, "per_goal must be >= 1");
  if (cfg.n_symptoms != corpus.symptoms.size()) fail(Errc::ShapeMismatch, "encoder n_symptoms differs from the corpus vocabulary");
  Dataset ds;
  ds.task = task;
  ds.encoder = cfg;
  ds.symptoms = corpus.symptoms;
  ds.per_goal = per_goal;
  ds.seed = seed;
  for (const auto& goal : corpus.goals) {
    auto& out = goal.split == Split::Train ? ds.train : ds.test;
    for (std::size_t k = 0; k < per_goal; ++k) {
      Rng rng = example_rng(seed, goal, k);
      if (task == Task::Action) {
        const auto ex = simulate_action_state(goal, rng, cfg, k < per_goal / 2);
        out.push_back({vectorize(ex.state, cfg), ex.conclude ? kConclude : kQuery});
      } else {
        const auto ex = simulate_symptom_state(goal, rng, cfg);
        out.push_back({vectorize(ex.state, cfg), ex.label.value});
      }
    }
  }
  return ds;
}

namespace {

void write_records(const std::vector<LabeledVector>& records, Task task, const std::filesystem::path& path) {
  std::ostringstream os;
  const char* tag = to_string(task);
  for (const auto& r : records) {
    // Encoded states only hold small integers.
    std::vector<int> xi(r.x.begin(), r.x.end());
    os << json{{"label", r.label}, {"task", tag}, {"x", xi}}.dump() << '\n';
  }
  write_file(path, os.str());
}

std::vector<LabeledVector> read_records(const std::filesystem::path& path, Task task, std::size_t dim) {
  std::istringstream in(read_file(path));
  std::vector<LabeledVector> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (parse_task(j.at("task").get<std::string>()) != task) fail(Errc::Parse, "record task differs from dataset task");
      LabeledVector r{j.at("x").get<Vec>(), j.at("label").get<std::size_t>()};
      if (r.x.size() != dim) fail(Errc::ShapeMismatch, "record vector has the wrong length");
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      fail(Errc::Parse, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json meta{{"task", to_string(ds.task)},
            {"t_max", ds.encoder.t_max},
            {"n_symptoms", ds.encoder.n_symptoms},
            {"symptoms", ds.symptoms},
            {"per_goal", ds.per_goal},
            {"seed", ds.seed},
            {"train_size", ds.train.size()},
            {"test_size", ds.test.size()}};
  write_file(dir / "meta.json", meta.dump(1) + "\n");
  write_records(ds.train, ds.task, dir / "train.jsonl");
  write_records(ds.test, ds.task, dir / "test.jsonl");
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  try {
    const json meta = json::parse(read_file(dir / "meta.json"));
    ds.task = parse_task(meta.at("task").get<std::string>());
    ds.encoder.t_max = meta.at("t_max").get<int>();
    ds.encoder.n_symptoms = meta.at("n_symptoms").get<std::size_t>();
    ds.symptoms = meta.at("symptoms").get<std::vector<std::string>>();
    ds.per_goal = meta.at("per_goal").get<std::size_t>();
    ds.seed = meta.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    fail(Errc::Parse, "dataset meta: " + std::string(e.what()));
  }
  ds.encoder.check();
  ds.train = read_records(dir / "train.jsonl", ds.task, ds.encoder.input_dim());
  ds.test = read_records(dir / "test.jsonl", ds.task, ds.encoder.input_dim());
  return ds;
}

}  // namespace asd
