#include "asd/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "asd/error.hpp"
#include "asd/io.hpp"
#include "asd/kgraph.hpp"
#include "asd/rng.hpp"

namespace asd {

using nlohmann::json;

namespace {

std::optional<bool> find_in(const std::vector<SymptomAssignment>& set, SymptomId s) {
  for (const auto& a : set)
    if (a.symptom == s) return a.present;
  return std::nullopt;
}

std::size_t test_count(std::size_t n) { return static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n))); }

void assign_splits(std::vector<UserGoal*>& untagged, std::uint64_t seed) {
  std::vector<std::size_t> order(untagged.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(mix_seed(seed, 0x5b11));
  rng.shuffle(order);
  const std::size_t n_test = test_count(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) untagged[order[k]]->split = k < n_test ? Split::Test : Split::Train;
}

}  // namespace

std::optional<bool> UserGoal::lookup(SymptomId s) const {
  if (auto v = find_in(explicit_symptoms, s)) return v;
  return find_in(implicit_symptoms, s);
}

bool UserGoal::is_implicit(SymptomId s) const { return find_in(implicit_symptoms, s).has_value(); }
bool UserGoal::is_explicit(SymptomId s) const { return find_in(explicit_symptoms, s).has_value(); }

std::optional<SymptomId> Corpus::find_symptom(const std::string& name) const {
  auto it = std::find(symptoms.begin(), symptoms.end(), name);
  if (it == symptoms.end()) return std::nullopt;
  return SymptomId(static_cast<std::size_t>(it - symptoms.begin()));
}

std::optional<DiseaseId> Corpus::find_disease(const std::string& name) const {
  auto it = std::find(diseases.begin(), diseases.end(), name);
  if (it == diseases.end()) return std::nullopt;
  return DiseaseId(static_cast<std::size_t>(it - diseases.begin()));
}

std::vector<UserGoal> Corpus::goals_in(Split split) const {
  std::vector<UserGoal> out;
  for (const auto& g : goals)
    if (g.split == split) out.push_back(g);
  return out;
}

void validate(const Corpus& corpus) {
  std::set<std::string> names(corpus.symptoms.begin(), corpus.symptoms.end());
  if (names.size() != corpus.symptoms.size()) fail(Errc::DuplicateSymptom, "symptom vocabulary has duplicates");
  for (const auto& g : corpus.goals) {
    if (g.disease.value >= corpus.diseases.size()) fail(Errc::UnknownDisease, "goal " + g.id + ": disease out of range");
    if (g.implicit_symptoms.empty()) fail(Errc::EmptyImplicitSet, "goal " + g.id + " has an empty implicit set");
    std::set<std::size_t> seen_e, seen_i;
    for (const auto& a : g.explicit_symptoms) {
      if (a.symptom.value >= corpus.symptoms.size()) fail(Errc::OutOfRange, "goal " + g.id + ": symptom out of range");
      if (!seen_e.insert(a.symptom.value).second) fail(Errc::DuplicateSymptom, "goal " + g.id + ": duplicate explicit symptom");
    }
    for (const auto& a : g.implicit_symptoms) {
      if (a.symptom.value >= corpus.symptoms.size()) fail(Errc::OutOfRange, "goal " + g.id + ": symptom out of range");
      if (!seen_i.insert(a.symptom.value).second) fail(Errc::DuplicateSymptom, "goal " + g.id + ": duplicate implicit symptom");
      if (seen_e.count(a.symptom.value)) {
        fail(Errc::OverlappingSets, "goal " + g.id + ": " + corpus.symptoms[a.symptom.value] + " is both explicit and implicit");
      }
    }
  }
}

namespace {

// nlohmann::json collapses duplicate object keys (last one wins). A goal that
// repeats a symptom inside one set must still be rejected, so scan the raw
// text with a strict SAX pass first.
class DuplicateKeyCheck : public nlohmann::json_sax<json> {
 public:
  bool null() override { return true; }
  bool boolean(bool) override { return true; }
  bool number_integer(number_integer_t) override { return true; }
  bool number_unsigned(number_unsigned_t) override { return true; }
  bool number_float(number_float_t, const string_t&) override { return true; }
  bool string(string_t&) override { return true; }
  bool binary(binary_t&) override { return true; }
  bool start_object(std::size_t) override {
    keys_.emplace_back();
    return true;
  }
  bool key(string_t& k) override {
    if (!keys_.back().insert(k).second) duplicate = k;
    return duplicate.empty();
  }
  bool end_object() override {
    keys_.pop_back();
    return true;
  }
  bool start_array(std::size_t) override { return true; }
  bool end_array() override { return true; }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

  std::string duplicate;

 private:
  std::vector<std::set<std::string>> keys_;
};

}  // namespace

Corpus corpus_from_json(const std::string& text, std::uint64_t split_seed) {
  DuplicateKeyCheck check;
  json::sax_parse(text, &check);
  if (!check.duplicate.empty()) fail(Errc::DuplicateSymptom, "duplicate key '" + check.duplicate + "' in corpus");
  Corpus c;
  std::vector<bool> tagged;
  try {
    const json j = json::parse(text);
    c.symptoms = j.at("symptoms").get<std::vector<std::string>>();
    c.diseases = j.at("diseases").get<std::vector<std::string>>();
    std::map<std::string, std::size_t> sym;
    for (std::size_t i = 0; i < c.symptoms.size(); ++i) {
      if (!sym.emplace(c.symptoms[i], i).second) fail(Errc::DuplicateSymptom, "duplicate vocabulary symptom " + c.symptoms[i]);
    }
    auto read_set = [&](const json& obj, const std::string& gid) {
      if (!obj.is_object()) fail(Errc::Parse, "goal " + gid + ": symptom sets must be objects");
      std::vector<SymptomAssignment> out;
      for (auto it = obj.begin(); it != obj.end(); ++it) {
        auto s = sym.find(it.key());
        if (s == sym.end()) fail(Errc::UnknownSymptom, "goal " + gid + ": unknown symptom '" + it.key() + "'");
        const int v = it.value().is_boolean() ? int(it.value().get<bool>()) : it.value().get<int>();
        if (v != 0 && v != 1) fail(Errc::Parse, "goal " + gid + ": symptom values must be 0 or 1");
        out.push_back({SymptomId(s->second), v == 1});
      }
      // Canonical order inside a set is vocabulary order.
      std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.symptom < b.symptom; });
      return out;
    };
    for (const auto& gj : j.at("goals")) {
      UserGoal g;
      g.id = gj.at("id").get<std::string>();
      const auto dname = gj.at("disease").get<std::string>();
      auto d = c.find_disease(dname);
      if (!d) fail(Errc::UnknownDisease, "goal " + g.id + ": unknown disease '" + dname + "'");
      g.disease = *d;
      g.explicit_symptoms = read_set(gj.at("explicit"), g.id);
      g.implicit_symptoms = read_set(gj.at("implicit"), g.id);
      if (gj.contains("split")) {
        const auto s = gj.at("split").get<std::string>();
        if (s == "train") g.split = Split::Train;
        else if (s == "test") g.split = Split::Test;
        else fail(Errc::Parse, "goal " + g.id + ": split must be 'train' or 'test'");
        tagged.push_back(true);
      } else {
        tagged.push_back(false);
      }
      c.goals.push_back(std::move(g));
    }
  } catch (const json::exception& e) {
    fail(Errc::Parse, std::string("corpus file: ") + e.what());
  }
  validate(c);
  std::vector<UserGoal*> untagged;
  for (std::size_t i = 0; i < c.goals.size(); ++i)
    if (!tagged[i]) untagged.push_back(&c.goals[i]);
  assign_splits(untagged, split_seed);
  return c;
}

Corpus load_corpus(const std::filesystem::path& path, std::uint64_t split_seed) {
  return corpus_from_json(read_file(path), split_seed);
}

std::string corpus_to_json(const Corpus& corpus) {
  json j;
  j["symptoms"] = corpus.symptoms;
  j["diseases"] = corpus.diseases;
  json goals = json::array();
  for (const auto& g : corpus.goals) {
    auto set = [&](const std::vector<SymptomAssignment>& s) {
      json o = json::object();
      for (const auto& a : s) o[corpus.symptoms[a.symptom.value]] = a.present ? 1 : 0;
      return o;
    };
    goals.push_back({{"id", g.id},
                     {"disease", corpus.diseases[g.disease.value]},
                     {"explicit", set(g.explicit_symptoms)},
                     {"implicit", set(g.implicit_symptoms)},
                     {"split", g.split == Split::Train ? "train" : "test"}});
  }
  j["goals"] = std::move(goals);
  return j.dump(1) + "\n";
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) { write_file(path, corpus_to_json(corpus)); }

CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.goals.empty()) fail(Errc::EmptyCorpus, "corpus has no goals");
  CorpusStats st;
  st.goals = corpus.goals.size();
  double e = 0, i = 0;
  for (const auto& g : corpus.goals) {
    (g.split == Split::Train ? st.train : st.test) += 1;
    e += static_cast<double>(g.explicit_symptoms.size());
    i += static_cast<double>(g.implicit_symptoms.size());
  }
  st.mean_explicit = e / static_cast<double>(st.goals);
  st.mean_implicit = i / static_cast<double>(st.goals);
  return st;
}

Corpus synth_corpus(std::uint64_t seed, std::size_t n_goals, const KnowledgeGraph& kg, double mean_explicit,
                    double mean_implicit, const SynthOptions& options) {
  if (kg.empty() || kg.n_diseases() == 0) fail(Errc::InvalidArgument, "synth_corpus needs a non-empty graph");
  const std::size_t ns = kg.n_symptoms();
  if (mean_explicit < 1.0 || mean_implicit < 1.0) fail(Errc::InfeasibleMeans, "symptom means must be >= 1");
  if (ns < 2 || mean_explicit + mean_implicit > static_cast<double>(ns)) {
    fail(Errc::InfeasibleMeans, "symptom means exceed the vocabulary size");
  }
  Corpus c;
  c.symptoms = kg.symptoms();
  c.diseases = kg.diseases();
  Rng rng(mix_seed(seed, 0xc0de));
  // Each disease ranks its symptoms once; rank r has weight (r + 1)^-skew.
  std::vector<std::vector<double>> prevalence(kg.n_diseases(), std::vector<double>(ns, 0.0));
  for (std::size_t d = 0; d < kg.n_diseases(); ++d) {
    std::vector<std::size_t> order = kg.symptoms_of(d);
    rng.shuffle(order);
    for (std::size_t r = 0; r < order.size(); ++r)
      prevalence[d][order[r]] = std::pow(static_cast<double>(r + 1), -options.prevalence_skew);
  }
  for (std::size_t gi = 0; gi < n_goals; ++gi) {
    UserGoal g;
    char buf[32];
    std::snprintf(buf, sizeof buf, "g%05zu", gi);
    g.id = buf;
    g.disease = DiseaseId(rng.below(kg.n_diseases()));
    std::size_t n_e = 1 + static_cast<std::size_t>(rng.poisson(mean_explicit - 1.0));
    std::size_t n_i = 1 + static_cast<std::size_t>(rng.poisson(mean_implicit - 1.0));
    n_e = std::min(n_e, ns - 1);
    n_i = std::min(n_i, ns - n_e);

    const std::vector<std::size_t>& near = kg.symptoms_of(g.disease.value);
    const std::vector<double>& weight = prevalence[g.disease.value];
    std::vector<bool> taken(ns, false);
    auto draw = [&]() {
      if (rng.bernoulli(options.neighborhood_bias)) {
        double total = 0.0;
        for (std::size_t s : near)
          if (!taken[s]) total += weight[s];
        if (total > 0.0) {
          double u = rng.uniform() * total;
          std::size_t pick = ns;
          for (std::size_t s : near) {
            if (taken[s]) continue;
            pick = s;
            u -= weight[s];
            if (u < 0.0) break;
          }
          taken[pick] = true;
          return SymptomId(pick);
        }
      }
      std::vector<std::size_t> pool;
      for (std::size_t s = 0; s < ns; ++s)
        if (!taken[s]) pool.push_back(s);
      const std::size_t s = pool[rng.below(pool.size())];
      taken[s] = true;
      return SymptomId(s);
    };
    for (std::size_t k = 0; k < n_e; ++k) g.explicit_symptoms.push_back({draw(), rng.bernoulli(options.explicit_present)});
    for (std::size_t k = 0; k < n_i; ++k) g.implicit_symptoms.push_back({draw(), rng.bernoulli(options.implicit_present)});
    auto by_id = [](const auto& a, const auto& b) { return a.symptom < b.symptom; };
    std::sort(g.explicit_symptoms.begin(), g.explicit_symptoms.end(), by_id);
    std::sort(g.implicit_symptoms.begin(), g.implicit_symptoms.end(), by_id);
    c.goals.push_back(std::move(g));
  }
  std::vector<UserGoal*> all;
  for (auto& g : c.goals) all.push_back(&g);
  assign_splits(all, seed);
  validate(c);
  return c;
}

}  // namespace asd
