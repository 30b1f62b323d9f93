#include "asd/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asd/error.hpp"
#include "asd/kgraph.hpp"
#include "asd/rng.hpp"

namespace asd {

const char* to_string(Arch a) { return a == Arch::Mlp ? "mlp" : "gmemnn"; }
const char* to_string(Task t) { return t == Task::Action ? "action" : "symptom"; }

Arch parse_arch(const std::string& s) {
  if (s == "mlp") return Arch::Mlp;
  if (s == "gmemnn") return Arch::Gmemnn;
  fail(Errc::InvalidArgument, "unknown arch '" + s + "' (expected mlp or gmemnn)");
}

Task parse_task(const std::string& s) {
  if (s == "action") return Task::Action;
  if (s == "symptom") return Task::Symptom;
  fail(Errc::InvalidArgument, "unknown task '" + s + "' (expected action or symptom)");
}

Vec softmax(std::span<const double> z) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double peak = kNegInf;
  for (double v : z) peak = std::max(peak, v);
  if (z.empty() || peak == kNegInf) fail(Errc::AllMasked, "softmax of an all -inf vector");
  Vec p(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = z[i] == kNegInf ? 0.0 : std::exp(z[i] - peak);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

Vec masked_logits(std::span<const double> logits, const std::vector<bool>& mask) {
  if (mask.size() != logits.size()) fail(Errc::ShapeMismatch, "mask length differs from logits");
  Vec out(logits.begin(), logits.end());
  bool any_open = false;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mask[i]) out[i] = -std::numeric_limits<double>::infinity();
    else any_open = true;
  }
  if (!any_open) fail(Errc::AllMasked, "every position is masked");
  return out;
}

std::size_t argmax(std::span<const double> v) {
  if (v.empty()) fail(Errc::ShapeMismatch, "argmax of an empty vector");
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

double cross_entropy(std::span<const double> probabilities, std::size_t label) {
  if (label >= probabilities.size()) fail(Errc::OutOfRange, "label outside the distribution");
  if (probabilities[label] <= 0.0) fail(Errc::ZeroProbability, "label has zero probability");
  return -std::log(probabilities[label]);
}

std::size_t default_hidden(Arch arch) { return arch == Arch::Mlp ? 128 : 64; }

namespace {

void xavier(Matrix& m, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (double& v : m.flat()) v = rng.uniform(-bound, bound);
}

bool is_initial_bank(const std::string& name) {
  return name == "D0m" || name == "D0c" || name == "S0m" || name == "S0c";
}

Matrix& owner_sym_sym(GmemnnParams& p, const ModelConfig& c, bool m) {
  if (c.tie_symptom_matrices) return m ? p.dis_sym_m : p.dis_sym_c;
  return m ? p.sym_sym_m : p.sym_sym_c;
}
const Matrix& owner_sym_sym(const GmemnnParams& p, const ModelConfig& c, bool m) {
  return owner_sym_sym(const_cast<GmemnnParams&>(p), c, m);
}
Matrix& owner_sym_dis(GmemnnParams& p, const ModelConfig& c, bool m) {
  if (c.tie_disease_matrices) return m ? p.d0m : p.d0c;
  return m ? p.sym_dis_m : p.sym_dis_c;
}
const Matrix& owner_sym_dis(const GmemnnParams& p, const ModelConfig& c, bool m) {
  return owner_sym_dis(const_cast<GmemnnParams&>(p), c, m);
}

Model shaped(const ModelConfig& c) {
  Model m;
  m.config = c;
  if (c.in_dim == 0 || c.n_symptoms == 0 || c.hidden == 0) fail(Errc::InvalidArgument, "model dimensions must be positive");
  const std::size_t h = c.hidden;
  if (c.arch == Arch::Mlp) {
    MlpParams p;
    p.w1 = Matrix(h, c.in_dim);
    p.b1 = Matrix(h, 1);
    p.w2 = Matrix(c.out_dim(), h);
    p.b2 = Matrix(c.out_dim(), 1);
    m.params = std::move(p);
  } else {
    if (c.n_diseases == 0) fail(Errc::InvalidArgument, "gmemnn needs n_diseases >= 1");
    GmemnnParams p;
    p.wx = Matrix(h, c.in_dim);
    p.bx = Matrix(h, 1);
    p.d0m = Matrix(c.n_diseases, h);
    p.d0c = Matrix(c.n_diseases, h);
    p.dis_sym_m = Matrix(c.n_symptoms, h);
    p.dis_sym_c = Matrix(c.n_symptoms, h);
    p.s0m = Matrix(c.n_symptoms, h);
    p.s0c = Matrix(c.n_symptoms, h);
    if (!c.tie_symptom_matrices) {
      p.sym_sym_m = Matrix(c.n_symptoms, h);
      p.sym_sym_c = Matrix(c.n_symptoms, h);
    }
    if (!c.tie_disease_matrices) {
      p.sym_dis_m = Matrix(c.n_diseases, h);
      p.sym_dis_c = Matrix(c.n_diseases, h);
    }
    p.wact = Matrix(2, h);
    p.bact = Matrix(2, 1);
    p.wsym = Matrix(c.n_symptoms, h);
    p.bsym = Matrix(c.n_symptoms, 1);
    m.params = std::move(p);
  }
  return m;
}

}  // namespace

Model Model::create(const ModelConfig& config, std::uint64_t seed) {
  Model m = shaped(config);
  Rng rng(mix_seed(seed, 0x1417));
  m.for_each_tensor([&](const char* name, Matrix& t, bool is_bias) {
    if (!is_bias && !is_initial_bank(name)) xavier(t, rng);
  });
  return m;
}

Model Model::zeros_like(const Model& like) { return shaped(like.config); }

bool Model::trains(const std::string& name) const {
  if (config.arch == Arch::Mlp) return true;
  if (config.task == Task::Action) return name != "Wsym" && name != "bsym";
  return name != "Wact" && name != "bact";
}

// ---------------------------------------------------------------------------

MlpTrace mlp_forward_trace(const MlpParams& p, std::span<const double> x) {
  if (x.size() != p.w1.cols()) fail(Errc::ShapeMismatch, "mlp input has wrong length");
  MlpTrace t;
  t.hidden.resize(p.w1.rows());
  affine(p.w1, x, &p.b1, t.hidden);
  for (double& v : t.hidden) v = std::max(v, 0.0);
  t.logits.resize(p.w2.rows());
  affine(p.w2, t.hidden, &p.b2, t.logits);
  return t;
}

Vec mlp_forward(const MlpParams& p, std::span<const double> x) { return mlp_forward_trace(p, x).logits; }

GmemnnMemory gmemnn_memory(const GmemnnParams& p, const ModelConfig& cfg, const KnowledgeGraph& kg) {
  if (kg.n_symptoms() != cfg.n_symptoms || kg.n_diseases() != cfg.n_diseases) {
    fail(Errc::ShapeMismatch, "knowledge graph dimensions do not match the model");
  }
  GmemnnMemory mem{p.d0m, p.d0c, p.s0m, p.s0c};
  for (std::size_t i = 0; i < cfg.n_diseases; ++i) {
    const auto& nbrs = kg.symptoms_of(i);
    if (nbrs.empty()) continue;
    const double inv = 1.0 / static_cast<double>(nbrs.size());
    for (std::size_t s : nbrs) {
      axpy(inv, p.dis_sym_m.row(s), mem.dis_m.row(i));
      axpy(inv, p.dis_sym_c.row(s), mem.dis_c.row(i));
    }
  }
  const Matrix& ssm = owner_sym_sym(p, cfg, true);
  const Matrix& ssc = owner_sym_sym(p, cfg, false);
  const Matrix& sdm = owner_sym_dis(p, cfg, true);
  const Matrix& sdc = owner_sym_dis(p, cfg, false);
  for (std::size_t i = 0; i < cfg.n_symptoms; ++i) {
    const auto& comp = kg.complications_of(i);
    if (!comp.empty()) {
      const double inv = 1.0 / static_cast<double>(comp.size());
      for (std::size_t j : comp) {
        axpy(inv, ssm.row(j), mem.sym_m.row(i));
        axpy(inv, ssc.row(j), mem.sym_c.row(i));
      }
    }
    const auto& dis = kg.diseases_of(i);
    if (!dis.empty()) {
      const double inv = 1.0 / static_cast<double>(dis.size());
      for (std::size_t k : dis) {
        axpy(inv, sdm.row(k), mem.sym_m.row(i));
        axpy(inv, sdc.row(k), mem.sym_c.row(i));
      }
    }
  }
  return mem;
}

namespace {

// Attention read: weights = softmax(query . keys_i), read = sum weights_i values_i.
void attend(std::span<const double> query, const Matrix& keys, const Matrix& values, Vec& weights, Vec& read) {
  Vec scores(keys.rows());
  for (std::size_t i = 0; i < keys.rows(); ++i) scores[i] = dot(query, keys.row(i));
  weights = softmax(scores);
  read.assign(values.cols(), 0.0);
  for (std::size_t i = 0; i < values.rows(); ++i) axpy(weights[i], values.row(i), read);
}

// Backward through attend. Accumulates into d_keys/d_values and d_query.
void attend_backward(std::span<const double> query, const Matrix& keys, const Matrix& values, const Vec& weights,
                     std::span<const double> d_read, Matrix& d_keys, Matrix& d_values, std::span<double> d_query) {
  const std::size_t n = keys.rows();
  Vec d_w(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    axpy(weights[i], d_read, d_values.row(i));
    d_w[i] = dot(values.row(i), d_read);
    mean += weights[i] * d_w[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double d_score = weights[i] * (d_w[i] - mean);
    if (d_score == 0.0) continue;
    axpy(d_score, keys.row(i), d_query);
    axpy(d_score, query, d_keys.row(i));
  }
}

}  // namespace

GmemnnTrace gmemnn_forward(const GmemnnParams& p, const ModelConfig& cfg, const GmemnnMemory& mem,
                           std::span<const double> x) {
  if (x.size() != p.wx.cols()) fail(Errc::ShapeMismatch, "gmemnn input has wrong length");
  const std::size_t h = cfg.hidden;
  GmemnnTrace t;
  t.u0.resize(h);
  affine(p.wx, x, &p.bx, t.u0);

  attend(t.u0, mem.dis_m, mem.dis_c, t.attn_dis, t.e_dis);
  t.u_d.resize(h);
  for (std::size_t k = 0; k < h; ++k) t.u_d[k] = std::max(t.u0[k] + t.e_dis[k], 0.0);

  attend(t.u_d, mem.sym_m, mem.sym_c, t.attn_sym, t.e_sym);
  t.u_ds.resize(h);
  for (std::size_t k = 0; k < h; ++k) t.u_ds[k] = std::max(t.u_d[k] + t.e_sym[k], 0.0);

  t.act_logits.resize(2);
  affine(p.wact, t.u_ds, &p.bact, t.act_logits);
  t.sym_logits.resize(cfg.n_symptoms);
  affine(p.wsym, t.u_ds, &p.bsym, t.sym_logits);
  return t;
}

GmemnnTrace gmemnn_forward(const GmemnnParams& p, const ModelConfig& cfg, const KnowledgeGraph& kg,
                           std::span<const double> x) {
  return gmemnn_forward(p, cfg, gmemnn_memory(p, cfg, kg), x);
}

Predictor::Predictor(const Model& model, const KnowledgeGraph* kg) : model_(model) {
  if (model.config.arch == Arch::Gmemnn) {
    if (!kg) fail(Errc::InvalidArgument, "gmemnn inference needs a knowledge graph");
    memory_ = gmemnn_memory(std::get<GmemnnParams>(model.params), model.config, *kg);
  }
}

Vec Predictor::logits(std::span<const double> x) const {
  if (model_.config.arch == Arch::Mlp) return mlp_forward(std::get<MlpParams>(model_.params), x);
  auto t = gmemnn_forward(std::get<GmemnnParams>(model_.params), model_.config, *memory_, x);
  return model_.config.task == Task::Action ? t.act_logits : t.sym_logits;
}

// ---------------------------------------------------------------------------

namespace {

// Softmax cross-entropy via log-sum-exp; writes (p - onehot) * scale into g.
double softmax_xent(std::span<const double> z, std::size_t label, double scale, Vec& g) {
  if (label >= z.size()) fail(Errc::OutOfRange, "label outside the output space");
  const double peak = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  g.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    g[i] = std::exp(z[i] - peak);
    total += g[i];
  }
  for (std::size_t i = 0; i < z.size(); ++i) g[i] = (g[i] / total - (i == label ? 1.0 : 0.0)) * scale;
  return std::log(total) + peak - z[label];
}

double mlp_batch(const MlpParams& p, std::span<const LabeledVector* const> batch, MlpParams& g) {
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  Vec dz, dh(p.w1.rows());
  for (const LabeledVector* ex : batch) {
    const MlpTrace t = mlp_forward_trace(p, ex->x);
    loss += softmax_xent(t.logits, ex->label, scale, dz);
    outer_acc(g.w2, dz, t.hidden);
    axpy(1.0, dz, g.b2.flat());
    std::fill(dh.begin(), dh.end(), 0.0);
    affine_transpose_acc(p.w2, dz, dh);
    for (std::size_t k = 0; k < dh.size(); ++k)
      if (t.hidden[k] <= 0.0) dh[k] = 0.0;
    outer_acc(g.w1, dh, ex->x);
    axpy(1.0, dh, g.b1.flat());
  }
  return loss * scale;
}

double gmemnn_batch(const GmemnnParams& p, const ModelConfig& cfg, const KnowledgeGraph& kg,
                    std::span<const LabeledVector* const> batch, GmemnnParams& g) {
  const std::size_t h = cfg.hidden;
  const GmemnnMemory mem = gmemnn_memory(p, cfg, kg);
  GmemnnMemory dmem{Matrix(cfg.n_diseases, h), Matrix(cfg.n_diseases, h), Matrix(cfg.n_symptoms, h),
                    Matrix(cfg.n_symptoms, h)};
  const bool action = cfg.task == Task::Action;
  const Matrix& head_w = action ? p.wact : p.wsym;
  Matrix& head_gw = action ? g.wact : g.wsym;
  Matrix& head_gb = action ? g.bact : g.bsym;

  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  Vec dz, d_uds(h), d_ud(h), d_u0(h);
  for (const LabeledVector* ex : batch) {
    const GmemnnTrace t = gmemnn_forward(p, cfg, mem, ex->x);
    loss += softmax_xent(action ? t.act_logits : t.sym_logits, ex->label, scale, dz);
    outer_acc(head_gw, dz, t.u_ds);
    axpy(1.0, dz, head_gb.flat());

    std::fill(d_uds.begin(), d_uds.end(), 0.0);
    affine_transpose_acc(head_w, dz, d_uds);
    for (std::size_t k = 0; k < h; ++k)
      if (t.u_ds[k] <= 0.0) d_uds[k] = 0.0;
    // u_ds = ReLU(u_d + e_sym): both branches see the same gradient.
    d_ud = d_uds;
    attend_backward(t.u_d, mem.sym_m, mem.sym_c, t.attn_sym, d_uds, dmem.sym_m, dmem.sym_c, d_ud);
    for (std::size_t k = 0; k < h; ++k)
      if (t.u_d[k] <= 0.0) d_ud[k] = 0.0;
    d_u0 = d_ud;
    attend_backward(t.u0, mem.dis_m, mem.dis_c, t.attn_dis, d_ud, dmem.dis_m, dmem.dis_c, d_u0);
    outer_acc(g.wx, d_u0, ex->x);
    axpy(1.0, d_u0, g.bx.flat());
  }

  // Memory gradients flow back into the embedding banks through the same
  // degree-normalized neighbor sums used by gmemnn_memory.
  axpy(1.0, dmem.dis_m.flat(), g.d0m.flat());
  axpy(1.0, dmem.dis_c.flat(), g.d0c.flat());
  axpy(1.0, dmem.sym_m.flat(), g.s0m.flat());
  axpy(1.0, dmem.sym_c.flat(), g.s0c.flat());
  for (std::size_t i = 0; i < cfg.n_diseases; ++i) {
    const auto& nbrs = kg.symptoms_of(i);
    if (nbrs.empty()) continue;
    const double inv = 1.0 / static_cast<double>(nbrs.size());
    for (std::size_t s : nbrs) {
      axpy(inv, dmem.dis_m.row(i), g.dis_sym_m.row(s));
      axpy(inv, dmem.dis_c.row(i), g.dis_sym_c.row(s));
    }
  }
  Matrix& gssm = owner_sym_sym(g, cfg, true);
  Matrix& gssc = owner_sym_sym(g, cfg, false);
  Matrix& gsdm = owner_sym_dis(g, cfg, true);
  Matrix& gsdc = owner_sym_dis(g, cfg, false);
  for (std::size_t i = 0; i < cfg.n_symptoms; ++i) {
    const auto& comp = kg.complications_of(i);
    if (!comp.empty()) {
      const double inv = 1.0 / static_cast<double>(comp.size());
      for (std::size_t j : comp) {
        axpy(inv, dmem.sym_m.row(i), gssm.row(j));
        axpy(inv, dmem.sym_c.row(i), gssc.row(j));
      }
    }
    const auto& dis = kg.diseases_of(i);
    if (!dis.empty()) {
      const double inv = 1.0 / static_cast<double>(dis.size());
      for (std::size_t k : dis) {
        axpy(inv, dmem.sym_m.row(i), gsdm.row(k));
        axpy(inv, dmem.sym_c.row(i), gsdc.row(k));
      }
    }
  }
  return loss * scale;
}

}  // namespace

double loss_and_gradients(const Model& model, const KnowledgeGraph* kg, std::span<const LabeledVector* const> batch,
                          Model& grads) {
  if (batch.empty()) fail(Errc::InvalidArgument, "empty batch");
  if (!(grads.config == model.config)) fail(Errc::ShapeMismatch, "gradient buffer does not match the model");
  grads.for_each_tensor([](const char*, Matrix& t, bool) { t.fill(0.0); });
  if (model.config.arch == Arch::Mlp) {
    return mlp_batch(std::get<MlpParams>(model.params), batch, std::get<MlpParams>(grads.params));
  }
  if (!kg) fail(Errc::InvalidArgument, "gmemnn training needs a knowledge graph");
  return gmemnn_batch(std::get<GmemnnParams>(model.params), model.config, *kg, batch,
                      std::get<GmemnnParams>(grads.params));
}

void sgd_step(Model& model, const Model& grads, double learning_rate, double weight_decay) {
  if (!(grads.config == model.config)) fail(Errc::ShapeMismatch, "gradient buffer does not match the model");
  std::vector<const Matrix*> g;
  grads.for_each_tensor([&](const char*, const Matrix& t, bool) { g.push_back(&t); });
  std::size_t k = 0;
  model.for_each_tensor([&](const char* name, Matrix& w, bool is_bias) {
    const Matrix& gw = *g[k++];
    if (!model.trains(name)) return;
    const double wd = is_bias ? 0.0 : weight_decay;
    auto wv = w.flat();
    auto gv = gw.flat();
    for (std::size_t i = 0; i < wv.size(); ++i) wv[i] -= learning_rate * (gv[i] + wd * wv[i]);
  });
}

}  // namespace asd
