#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asd/types.hpp"

namespace asd {

/// Symptom entry of the annotation source: the diseases that cause it, and for
/// each such disease the symptoms that co-occur with it (its complications).
struct RawAnnotation {
  std::string symptom;
  std::string disease;
  std::set<std::string> complications;
};

struct KgStats {
  std::size_t n_symptoms = 0;
  std::size_t n_diseases = 0;
  std::size_t sd_edges = 0;
  std::size_t sc_edges = 0;  // unordered pairs
  std::size_t total() const { return sd_edges + sc_edges; }
  std::string summary() const;
};

/// Bipartite symptom-disease incidence plus an undirected symptom-complication
/// graph. Immutable once built; every constructor path re-derives the degree
/// vectors and neighbor lists from the incidence bits.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  /// Duplicate edges collapse. Throws OutOfRange for bad indices and
  /// SelfComplication for a symptom paired with itself.
  static KnowledgeGraph from_edges(std::vector<std::string> symptoms, std::vector<std::string> diseases,
                                   std::span<const std::pair<std::size_t, std::size_t>> sd_edges,
                                   std::span<const std::pair<std::size_t, std::size_t>> sc_edges);

  std::size_t n_symptoms() const { return symptoms_.size(); }
  std::size_t n_diseases() const { return diseases_.size(); }
  const std::vector<std::string>& symptoms() const { return symptoms_; }
  const std::vector<std::string>& diseases() const { return diseases_; }

  bool sd(std::size_t symptom, std::size_t disease) const { return sd_[symptom * n_diseases() + disease] != 0; }
  bool sc(std::size_t a, std::size_t b) const { return sc_[a * n_symptoms() + b] != 0; }

  /// D_{d,i}: symptoms adjacent to disease i.
  std::size_t disease_degree(std::size_t d) const { return symptoms_of_[d].size(); }
  /// D_{s,i}: complication neighbors of symptom i.
  std::size_t symptom_sc_degree(std::size_t s) const { return complications_of_[s].size(); }
  /// D_{d,.,i}: diseases adjacent to symptom i.
  std::size_t symptom_sd_degree(std::size_t s) const { return diseases_of_[s].size(); }

  const std::vector<std::size_t>& symptoms_of(std::size_t d) const { return symptoms_of_[d]; }
  const std::vector<std::size_t>& diseases_of(std::size_t s) const { return diseases_of_[s]; }
  const std::vector<std::size_t>& complications_of(std::size_t s) const { return complications_of_[s]; }

  /// Sorted (symptom, disease) pairs.
  std::vector<std::pair<std::size_t, std::size_t>> sd_edges() const;
  /// Sorted unordered pairs with first < second.
  std::vector<std::pair<std::size_t, std::size_t>> sc_edges() const;

  KgStats stats() const;
  bool empty() const { return symptoms_.empty(); }

  bool operator==(const KnowledgeGraph& other) const {
    return symptoms_ == other.symptoms_ && diseases_ == other.diseases_ && sd_ == other.sd_ && sc_ == other.sc_;
  }

 private:
  void rebuild_indices();

  std::vector<std::string> symptoms_;
  std::vector<std::string> diseases_;
  std::vector<std::uint8_t> sd_;  // n_sym x n_dis, row-major
  std::vector<std::uint8_t> sc_;  // n_sym x n_sym, symmetric, zero diagonal
  std::vector<std::vector<std::size_t>> symptoms_of_;
  std::vector<std::vector<std::size_t>> diseases_of_;
  std::vector<std::vector<std::size_t>> complications_of_;
};

/// Rule 1: each (symptom, disease) annotation adds that S-D edge. Rule 2: each
/// complication c listed under (symptom, disease) adds the S-C edge
/// (symptom, c), stored symmetrically.
KnowledgeGraph build_graph(std::span<const RawAnnotation> annotations, const std::vector<std::string>& symptom_vocab,
                           const std::vector<std::string>& disease_vocab);

/// Accepts either the edge-list form or dense "A_d"/"A_s" matrices; the dense
/// form is checked for symmetry and zero diagonal.
KnowledgeGraph load_graph(const std::filesystem::path& path);
void save_graph(const KnowledgeGraph& kg, const std::filesystem::path& path);
std::string graph_to_json(const KnowledgeGraph& kg);
KnowledgeGraph graph_from_json(const std::string& text);

/// Random graph with exactly the requested edge counts. Every disease gets at
/// least one symptom; S-C edges are drawn first from symptom pairs that share
/// a disease, falling back to arbitrary pairs only when those run out.
KnowledgeGraph synth_graph(std::uint64_t seed, std::size_t n_symptoms, std::size_t n_diseases, std::size_t target_sd_edges,
                           std::size_t target_sc_edges);

}  // namespace asd
