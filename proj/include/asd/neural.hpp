#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "asd/tensor.hpp"

namespace asd {

class KnowledgeGraph;

enum class Arch { Mlp, Gmemnn };
enum class Task { Action, Symptom };

const char* to_string(Arch a);
const char* to_string(Task t);
Arch parse_arch(const std::string& s);
Task parse_task(const std::string& s);

/// Action head classes.
inline constexpr std::size_t kQuery = 0;
inline constexpr std::size_t kConclude = 1;

struct LabeledVector {
  Vec x;
  std::size_t label = 0;
  bool operator==(const LabeledVector&) const = default;
};

// ---------------------------------------------------------------------------
// Elementwise pieces shared by both architectures.

/// Stable softmax; -inf entries map to exactly 0. Throws AllMasked if every
/// entry is -inf.
Vec softmax(std::span<const double> z);
/// Copy of logits with masked positions set to -inf.
Vec masked_logits(std::span<const double> logits, const std::vector<bool>& mask);
std::size_t argmax(std::span<const double> v);
/// -ln p[label]. Throws ZeroProbability when p[label] == 0.
double cross_entropy(std::span<const double> probabilities, std::size_t label);

// ---------------------------------------------------------------------------
// Parameters.

struct MlpParams {
  Matrix w1, b1, w2, b2;

  template <class Self, class F>
  static void visit(Self& p, F&& f) {
    f("W1", p.w1, false);
    f("b1", p.b1, true);
    f("W2", p.w2, false);
    f("b2", p.b2, true);
  }
};

/// Graph memory network tensors. Names follow the checkpoint keys. When a tie
/// flag is set the aliased tensor is left empty and its owner is read instead:
/// tie_symptom_matrices maps WmS_sym/WcS_sym onto WmS_dis/WcS_dis, and
/// tie_disease_matrices maps WmD/WcD onto D0m/D0c.
struct GmemnnParams {
  Matrix wx, bx;                  // state encoder
  Matrix d0m, d0c;                // initial disease embeddings
  Matrix dis_sym_m, dis_sym_c;    // symptom matrices aggregated into diseases
  Matrix s0m, s0c;                // initial symptom embeddings
  Matrix sym_sym_m, sym_sym_c;    // complication-symptom matrices
  Matrix sym_dis_m, sym_dis_c;    // disease matrices aggregated into symptoms
  Matrix wact, bact, wsym, bsym;  // output heads

  template <class Self, class F>
  static void visit(Self& p, F&& f) {
    f("Wx", p.wx, false);
    f("bx", p.bx, true);
    f("D0m", p.d0m, false);
    f("D0c", p.d0c, false);
    f("WmS_dis", p.dis_sym_m, false);
    f("WcS_dis", p.dis_sym_c, false);
    f("S0m", p.s0m, false);
    f("S0c", p.s0c, false);
    f("WmS_sym", p.sym_sym_m, false);
    f("WcS_sym", p.sym_sym_c, false);
    f("WmD", p.sym_dis_m, false);
    f("WcD", p.sym_dis_c, false);
    f("Wact", p.wact, false);
    f("bact", p.bact, true);
    f("Wsym", p.wsym, false);
    f("bsym", p.bsym, true);
  }
};

struct ModelConfig {
  Arch arch = Arch::Mlp;
  Task task = Task::Action;
  std::size_t in_dim = 0;
  std::size_t n_symptoms = 0;
  std::size_t n_diseases = 0;  // gmemnn only
  std::size_t hidden = 128;
  int t_max = 20;
  bool tie_symptom_matrices = false;
  bool tie_disease_matrices = false;

  std::size_t out_dim() const { return task == Task::Action ? 2 : n_symptoms; }
  bool operator==(const ModelConfig&) const = default;
};

/// Hidden width defaults: 128 for the MLP, 64 for the GMemNN.
std::size_t default_hidden(Arch arch);

struct Model {
  ModelConfig config;
  std::variant<MlpParams, GmemnnParams> params;

  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)); biases and the
  /// initial embedding banks start at zero.
  static Model create(const ModelConfig& config, std::uint64_t seed);
  /// Same shapes as `like`, all zeros.
  static Model zeros_like(const Model& like);

  /// Visits every tensor as f(name, matrix, is_bias). Tied-away tensors are
  /// visited as empty matrices.
  template <class F>
  void for_each_tensor(F&& f) {
    std::visit([&](auto& p) { std::decay_t<decltype(p)>::visit(p, f); }, params);
  }
  template <class F>
  void for_each_tensor(F&& f) const {
    std::visit([&](const auto& p) { std::decay_t<decltype(p)>::visit(p, f); }, params);
  }

  /// Whether training on config.task touches this tensor. The GMemNN head of
  /// the other task is frozen.
  bool trains(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Forward passes.

struct MlpTrace {
  Vec hidden;  // post-ReLU
  Vec logits;
};

MlpTrace mlp_forward_trace(const MlpParams& p, std::span<const double> x);
/// W2 ReLU(W1 x + b1) + b2.
Vec mlp_forward(const MlpParams& p, std::span<const double> x);

/// Graph-derived memory: disease and symptom embeddings after neighbor
/// aggregation. Independent of the input state, so it is computed once per
/// parameter version.
struct GmemnnMemory {
  Matrix dis_m, dis_c;  // n_dis x h
  Matrix sym_m, sym_c;  // n_sym x h
};

struct GmemnnTrace {
  Vec u0;        // encoder output, no activation
  Vec attn_dis;  // attention over diseases
  Vec e_dis;
  Vec u_d;       // ReLU(u0 + e_dis)
  Vec attn_sym;  // attention over symptoms
  Vec e_sym;
  Vec u_ds;      // ReLU(u_d + e_sym)
  Vec act_logits;
  Vec sym_logits;
};

GmemnnMemory gmemnn_memory(const GmemnnParams& p, const ModelConfig& cfg, const KnowledgeGraph& kg);
GmemnnTrace gmemnn_forward(const GmemnnParams& p, const ModelConfig& cfg, const GmemnnMemory& mem,
                           std::span<const double> x);
GmemnnTrace gmemnn_forward(const GmemnnParams& p, const ModelConfig& cfg, const KnowledgeGraph& kg,
                           std::span<const double> x);

/// Caches the GMemNN memory for repeated inference with fixed parameters.
class Predictor {
 public:
  Predictor(const Model& model, const KnowledgeGraph* kg);
  /// Logits of the model's task head.
  Vec logits(std::span<const double> x) const;
  const Model& model() const { return model_; }

 private:
  const Model& model_;
  std::optional<GmemnnMemory> memory_;
};

// ---------------------------------------------------------------------------
// Training.

/// Mean cross-entropy over the batch; grads is overwritten with the mean gradient. Only
/// tensors the model trains for its task receive gradient.
double loss_and_gradients(const Model& model, const KnowledgeGraph* kg, std::span<const LabeledVector* const> batch,
                          Model& grads);

/// w <- w - lr * (g + wd * w) for trained weight tensors; biases skip decay;
/// tensors outside the task are untouched.
void sgd_step(Model& model, const Model& grads, double learning_rate, double weight_decay);

}  // namespace asd
