#include "asd/kgraph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "asd/error.hpp"
#include "asd/io.hpp"
#include "asd/rng.hpp"
#include "asd/vocab.hpp"

namespace asd {

using nlohmann::json;

std::string KgStats::summary() const {
  std::ostringstream os;
  os << "symptoms " << n_symptoms << ", diseases " << n_diseases << ", sd " << sd_edges << ", sc " << sc_edges
     << ", total " << total();
  return os.str();
}

KnowledgeGraph KnowledgeGraph::from_edges(std::vector<std::string> symptoms, std::vector<std::string> diseases,
                                          std::span<const std::pair<std::size_t, std::size_t>> sd_edges,
                                          std::span<const std::pair<std::size_t, std::size_t>> sc_edges) {
  KnowledgeGraph kg;
  kg.symptoms_ = std::move(symptoms);
  kg.diseases_ = std::move(diseases);
  const std::size_t ns = kg.n_symptoms();
  const std::size_t nd = kg.n_diseases();
  kg.sd_.assign(ns * nd, 0);
  kg.sc_.assign(ns * ns, 0);
  for (auto [s, d] : sd_edges) {
    if (s >= ns || d >= nd) {
      fail(Errc::OutOfRange, "sd edge [" + std::to_string(s) + ", " + std::to_string(d) + "] out of range");
    }
    kg.sd_[s * nd + d] = 1;
  }
  for (auto [a, b] : sc_edges) {
    if (a >= ns || b >= ns) {
      fail(Errc::OutOfRange, "sc edge [" + std::to_string(a) + ", " + std::to_string(b) + "] out of range");
    }
    if (a == b) fail(Errc::SelfComplication, "symptom " + kg.symptoms_[a] + " listed as its own complication");
    kg.sc_[a * ns + b] = 1;
    kg.sc_[b * ns + a] = 1;
  }
  kg.rebuild_indices();
  return kg;
}

void KnowledgeGraph::rebuild_indices() {
  const std::size_t ns = n_symptoms();
  const std::size_t nd = n_diseases();
  symptoms_of_.assign(nd, {});
  diseases_of_.assign(ns, {});
  complications_of_.assign(ns, {});
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t d = 0; d < nd; ++d) {
      if (sd(s, d)) {
        symptoms_of_[d].push_back(s);
        diseases_of_[s].push_back(d);
      }
    }
    for (std::size_t t = 0; t < ns; ++t) {
      if (sc(s, t)) complications_of_[s].push_back(t);
    }
  }
}

std::vector<std::pair<std::size_t, std::size_t>> KnowledgeGraph::sd_edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t s = 0; s < n_symptoms(); ++s)
    for (std::size_t d : diseases_of_[s]) out.emplace_back(s, d);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> KnowledgeGraph::sc_edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t s = 0; s < n_symptoms(); ++s)
    for (std::size_t t : complications_of_[s])
      if (s < t) out.emplace_back(s, t);
  return out;
}

KgStats KnowledgeGraph::stats() const {
  KgStats st;
  st.n_symptoms = n_symptoms();
  st.n_diseases = n_diseases();
  for (const auto& v : symptoms_of_) st.sd_edges += v.size();
  for (const auto& v : complications_of_) st.sc_edges += v.size();
  st.sc_edges /= 2;
  return st;
}

namespace {

std::map<std::string, std::size_t> index_of(const std::vector<std::string>& names, Errc dup_code) {
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!out.emplace(names[i], i).second) fail(dup_code, "duplicate vocabulary entry: " + names[i]);
  }
  return out;
}

std::size_t lookup(const std::map<std::string, std::size_t>& m, const std::string& name, Errc code) {
  auto it = m.find(name);
  if (it == m.end()) fail(code, "unknown name: " + name);
  return it->second;
}

}  // namespace

KnowledgeGraph build_graph(std::span<const RawAnnotation> annotations, const std::vector<std::string>& symptom_vocab,
                           const std::vector<std::string>& disease_vocab) {
  auto sym = index_of(symptom_vocab, Errc::DuplicateSymptom);
  auto dis = index_of(disease_vocab, Errc::InvalidArgument);
  std::vector<std::pair<std::size_t, std::size_t>> sd, sc;
  for (const auto& a : annotations) {
    const std::size_t s = lookup(sym, a.symptom, Errc::UnknownSymptom);
    const std::size_t d = lookup(dis, a.disease, Errc::UnknownDisease);
    sd.emplace_back(s, d);
    for (const auto& c : a.complications) {
      const std::size_t ci = lookup(sym, c, Errc::UnknownSymptom);
      if (ci == s) fail(Errc::SelfComplication, "symptom " + a.symptom + " listed as its own complication");
      sc.emplace_back(s, ci);
    }
  }
  return KnowledgeGraph::from_edges(symptom_vocab, disease_vocab, sd, sc);
}

std::string graph_to_json(const KnowledgeGraph& kg) {
  json j;
  j["symptoms"] = kg.symptoms();
  j["diseases"] = kg.diseases();
  json sd = json::array();
  for (auto [s, d] : kg.sd_edges()) sd.push_back({s, d});
  json sc = json::array();
  for (auto [a, b] : kg.sc_edges()) sc.push_back({a, b});
  j["sd_edges"] = std::move(sd);
  j["sc_edges"] = std::move(sc);
  return j.dump(1) + "\n";
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> read_pairs(const json& arr, const char* key) {
  if (!arr.is_array()) fail(Errc::Parse, std::string("graph key '") + key + "' must be an array");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      fail(Errc::Parse, std::string("malformed entry in '") + key + "'");
    }
    const auto a = e[0].get<long long>();
    const auto b = e[1].get<long long>();
    if (a < 0 || b < 0) fail(Errc::OutOfRange, std::string("negative index in '") + key + "'");
    out.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }
  return out;
}

std::vector<std::vector<int>> read_dense(const json& m, std::size_t rows, std::size_t cols, const char* key) {
  if (!m.is_array() || m.size() != rows) fail(Errc::Parse, std::string("'") + key + "' has wrong row count");
  std::vector<std::vector<int>> out(rows, std::vector<int>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!m[i].is_array() || m[i].size() != cols) fail(Errc::Parse, std::string("'") + key + "' has wrong column count");
    for (std::size_t j = 0; j < cols; ++j) {
      const int v = m[i][j].get<int>();
      if (v != 0 && v != 1) fail(Errc::Parse, std::string("'") + key + "' entries must be 0 or 1");
      out[i][j] = v;
    }
  }
  return out;
}

}  // namespace

KnowledgeGraph graph_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
    auto symptoms = j.at("symptoms").get<std::vector<std::string>>();
    auto diseases = j.at("diseases").get<std::vector<std::string>>();
    index_of(symptoms, Errc::DuplicateSymptom);
    std::vector<std::pair<std::size_t, std::size_t>> sd, sc;
    if (j.contains("A_d") || j.contains("A_s")) {
      auto ad = read_dense(j.at("A_d"), symptoms.size(), diseases.size(), "A_d");
      auto as = read_dense(j.at("A_s"), symptoms.size(), symptoms.size(), "A_s");
      for (std::size_t s = 0; s < symptoms.size(); ++s) {
        for (std::size_t d = 0; d < diseases.size(); ++d)
          if (ad[s][d]) sd.emplace_back(s, d);
        for (std::size_t t = 0; t < symptoms.size(); ++t) {
          if (as[s][t] != as[t][s]) {
            fail(Errc::AsymmetricGraph, "A_s[" + std::to_string(s) + "," + std::to_string(t) + "] != A_s[" +
                                            std::to_string(t) + "," + std::to_string(s) + "]");
          }
          if (s == t && as[s][t]) fail(Errc::SelfComplication, "A_s has a nonzero diagonal at " + std::to_string(s));
          if (s < t && as[s][t]) sc.emplace_back(s, t);
        }
      }
    } else {
      sd = read_pairs(j.at("sd_edges"), "sd_edges");
      sc = read_pairs(j.at("sc_edges"), "sc_edges");
    }
    return KnowledgeGraph::from_edges(std::move(symptoms), std::move(diseases), sd, sc);
  } catch (const json::exception& e) {
    fail(Errc::Parse, std::string("graph file: ") + e.what());
  }
}

KnowledgeGraph load_graph(const std::filesystem::path& path) { return graph_from_json(read_file(path)); }

void save_graph(const KnowledgeGraph& kg, const std::filesystem::path& path) { write_file(path, graph_to_json(kg)); }

KnowledgeGraph synth_graph(std::uint64_t seed, std::size_t n_symptoms, std::size_t n_diseases, std::size_t target_sd_edges,
                           std::size_t target_sc_edges) {
  if (n_symptoms == 0 || n_diseases == 0) fail(Errc::InfeasibleTargets, "graph needs at least one symptom and disease");
  if (target_sd_edges < n_diseases || target_sd_edges > n_symptoms * n_diseases) {
    fail(Errc::InfeasibleTargets, "sd edge target must lie in [n_diseases, n_symptoms * n_diseases]");
  }
  if (target_sc_edges > n_symptoms * (n_symptoms - 1) / 2) {
    fail(Errc::InfeasibleTargets, "sc edge target exceeds the number of symptom pairs");
  }
  Rng rng(mix_seed(seed, 0x6b67));
  std::vector<std::uint8_t> sd(n_symptoms * n_diseases, 0);
  std::size_t placed = 0;
  auto place = [&](std::size_t s, std::size_t d) {
    if (!sd[s * n_diseases + d]) {
      sd[s * n_diseases + d] = 1;
      ++placed;
    }
  };
  // Coverage pass: one edge per disease, then one per symptom while the budget
  // still leaves room.
  for (std::size_t d = 0; d < n_diseases; ++d) place(rng.below(n_symptoms), d);
  std::vector<std::size_t> order(n_symptoms);
  for (std::size_t s = 0; s < n_symptoms; ++s) order[s] = s;
  rng.shuffle(order);
  for (std::size_t s : order) {
    if (placed >= target_sd_edges) break;
    bool has = false;
    for (std::size_t d = 0; d < n_diseases; ++d) has = has || sd[s * n_diseases + d];
    if (!has) place(s, rng.below(n_diseases));
  }
  std::vector<std::size_t> free_cells;
  for (std::size_t i = 0; i < sd.size(); ++i)
    if (!sd[i]) free_cells.push_back(i);
  for (std::size_t cell : rng.sample(free_cells, target_sd_edges - placed)) {
    sd[cell] = 1;
    ++placed;
  }

  std::vector<std::pair<std::size_t, std::size_t>> sd_edges;
  for (std::size_t s = 0; s < n_symptoms; ++s)
    for (std::size_t d = 0; d < n_diseases; ++d)
      if (sd[s * n_diseases + d]) sd_edges.emplace_back(s, d);

  std::vector<std::pair<std::size_t, std::size_t>> shared, other;
  for (std::size_t a = 0; a < n_symptoms; ++a) {
    for (std::size_t b = a + 1; b < n_symptoms; ++b) {
      bool co = false;
      for (std::size_t d = 0; d < n_diseases && !co; ++d) co = sd[a * n_diseases + d] && sd[b * n_diseases + d];
      (co ? shared : other).emplace_back(a, b);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> sc_edges = rng.sample(shared, std::min(shared.size(), target_sc_edges));
  if (sc_edges.size() < target_sc_edges) {
    auto extra = rng.sample(other, target_sc_edges - sc_edges.size());
    sc_edges.insert(sc_edges.end(), extra.begin(), extra.end());
  }
  return KnowledgeGraph::from_edges(symptom_names(n_symptoms), disease_names(n_diseases), sd_edges, sc_edges);
}

}  // namespace asd
