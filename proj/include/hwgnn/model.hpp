#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hwgnn/autodiff.hpp"
#include "hwgnn/graph.hpp"
#include "hwgnn/poly_basis.hpp"
#include "hwgnn/rng.hpp"
#include "hwgnn/types.hpp"
#include "hwgnn/window.hpp"

namespace hwgnn {

enum class Variant { windowed, plain };
enum class Activation { relu, tanh };

Variant variant_from_string(const std::string& name);
std::string to_string(Variant v);
Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);

struct ModelConfig {
  BasisKind basis = BasisKind::bernstein;
  int window_count = 5;  // S
  int order = 4;         // K
  int blocks = 2;        // C
  int hidden = 64;       // d
  int mlp_hidden = 16;
  double lambda_f = 0.3;
  double alpha = 0.25;
  double gamma = 2.0;
  Variant variant = Variant::windowed;
  bool homophily_aware = true;
  Activation activation = Activation::relu;
  CoeffMode coeff_mode = CoeffMode::overlap;
  double sigma_min = kSigmaMin;
  double sigma_max = kSigmaMax;
  double sigma_init = 0.2;  // bandwidth at zero-initialized MLPs
  // Center clip half-width is clip_scale / S, intersected with [0, 2]. The
  // learned centers sit on the clip boundary when this is too tight.
  double clip_scale = 2.0;

  void validate() const;
};

template <class S>
struct ParamStore {
  struct Entry {
    std::string name;
    MatT<S> value;
    MatT<S> m, v;  // Adam moments
  };
  std::vector<Entry> items;
  std::unordered_map<std::string, int> index;

  MatT<S>& add(const std::string& name, MatT<S> init) {
    index.emplace(name, static_cast<int>(items.size()));
    items.push_back(Entry{name, std::move(init), {}, {}});
    return items.back().value;
  }
  MatT<S>& at(const std::string& name) { return items[static_cast<size_t>(index.at(name))].value; }
  const MatT<S>& at(const std::string& name) const {
    return items[static_cast<size_t>(index.at(name))].value;
  }
  bool has(const std::string& name) const { return index.count(name) > 0; }
  size_t size() const { return items.size(); }
};

/// Parameters of the two window MLPs (each maps R^2 to a scalar).
struct WindowMlpNet {
  Mat w1, b1, w2, b2, w3, b3;
};
struct WindowMlps {
  WindowMlpNet omega, sigma;
};

/// Runs the two MLPs on (target_frequency(h), s_norm) and squashes outputs
/// into the per-window clip range [center - clip_scale/S, center +
/// clip_scale/S] (intersected with [0, 2]) and [sigma_min, sigma_max].
/// Zero-initialized final layers reproduce the equally spaced centers
/// exactly.
std::vector<GaussianWindow> produce_windows(const WindowMlps& mlps, double h, int S,
                                            double sigma_min = kSigmaMin,
                                            double sigma_max = kSigmaMax,
                                            double sigma_init = 0.2, double clip_scale = 2.0);

template <class S>
struct ForwardResult {
  int logits = -1;  // n x 2 node
  int focal = -1;
  int freq = -1;
  int loss = -1;
  std::vector<int> param_nodes;             // aligned with ParamStore::items
  std::vector<double> omega_hat;            // per block
  std::vector<WindowBank> banks;            // per block snapshot
  std::vector<std::pair<std::string, int>> named_nodes;  // divergence diagnostics
};

/// Stacked Gaussian-windowed spectral model: linear input projection,
/// `blocks` HW-Conv layers with residual connections, softmax head.
template <class S>
class HWModel {
 public:
  HWModel(ModelConfig cfg, int input_dim, std::uint64_t seed)
      : cfg_(cfg),
        input_dim_(input_dim),
        basis_(cfg.basis, cfg.order),
        table_(basis_, Quadrature::default_scheme(), cfg.coeff_mode) {
    cfg_.validate();
    init_params(seed);
  }

  const ModelConfig& config() const { return cfg_; }
  int input_dim() const { return input_dim_; }
  const PolyBasis& basis() const { return basis_; }
  ParamStore<S>& params() { return params_; }
  const ParamStore<S>& params() const { return params_; }

  /// Builds the full differentiable graph. `train_mask` drives the focal
  /// term; pass with_loss=false for pure inference (logits only).
  ForwardResult<S> forward(ad::Tape<S>& tape, const Laplacian& lap, const MatT<S>& X, double h,
                           const std::vector<std::int8_t>& labels = {},
                           const std::vector<int>& train_mask = {},
                           bool with_loss = true) const;

  /// Inference-only probabilities (rows sum to 1).
  MatT<S> predict(const Laplacian& lap, const MatT<S>& X, double h) const;

  /// Window bank snapshots for the current parameters (no graph needed).
  std::vector<WindowBank> window_banks(double h) const;

  /// Single HW-Conv layer output for block `b` given an input feature matrix.
  MatT<S> hwconv(int block, const Laplacian& lap, const MatT<S>& H, double h) const;

 private:
  ModelConfig cfg_;
  int input_dim_;
  PolyBasis basis_;
  BasisTable table_;
  ParamStore<S> params_;

  void init_params(std::uint64_t seed);
  MatT<S> glorot(int rows, int cols, std::uint64_t seed) const;

  struct BlockNodes {
    std::vector<int> coeffs;
    int weights = -1;
    std::vector<int> win_w;
    std::vector<int> omega_nodes;  // scalar nodes, windowed only
    std::vector<int> sigma_nodes;
    int omega_hat = -1;
  };
  BlockNodes build_bank(ad::Tape<S>& tape, int block, double h,
                        const std::vector<int>& pnodes) const;
  WindowBank snapshot_bank(const ad::Tape<S>& tape, const BlockNodes& bn, int block) const;

  int param_node(const std::vector<int>& pnodes, const std::string& name) const {
    return pnodes[static_cast<size_t>(params_.index.at(name))];
  }
};

/// Pure-value focal loss (for validation reporting; matches the tape op).
double focal_loss_value(const Mat& probs, const std::vector<std::int8_t>& labels,
                        const std::vector<int>& mask, double alpha, double gamma);

/// Row softmax of logits.
Mat softmax_rows(const Mat& logits);

}  // namespace hwgnn

// ---- implementation ----

namespace hwgnn {

inline void ModelConfig::validate() const {
  if (window_count < 1) throw ConfigError("window count S must be >= 1");
  if (order < 0) throw ConfigError("polynomial order K must be >= 0");
  if (blocks < 0) throw ConfigError("block count must be >= 0");
  if (hidden < 1) throw ConfigError("hidden width must be >= 1");
  if (!(lambda_f >= 0.0 && lambda_f < 1.0)) throw ConfigError("lambda_f must lie in [0,1)");
  if (sigma_min <= 0.0 || sigma_max < sigma_min) throw ConfigError("invalid sigma bounds");
  if (!(sigma_init > sigma_min && sigma_init < sigma_max))
    throw ConfigError("sigma_init must lie strictly inside (sigma_min, sigma_max)");
  if (clip_scale <= 0.0) throw ConfigError("clip_scale must be positive");
}

inline Variant variant_from_string(const std::string& name) {
  if (name == "windowed") return Variant::windowed;
  if (name == "plain") return Variant::plain;
  throw ConfigError("unknown variant: " + name);
}
inline std::string to_string(Variant v) { return v == Variant::windowed ? "windowed" : "plain"; }
inline Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw ConfigError("unknown activation: " + name);
}
inline std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

namespace detail {

/// Two tanh hidden layers then affine; input is a 1x2 row node.
template <class S>
int mlp_scalar(ad::Tape<S>& t, int input, int w1, int b1, int w2, int b2, int w3, int b3) {
  int h1 = t.tanh_(t.add_rowvec(t.matmul(input, w1), b1));
  int h2 = t.tanh_(t.add_rowvec(t.matmul(h1, w2), b2));
  return t.add_rowvec(t.matmul(h2, w3), b3);
}

/// lo + (hi-lo) * logistic(raw + bias): covers (lo, hi) with the zero-input
/// point placed at `init` instead of the midpoint.
template <class S>
int squash_logistic(ad::Tape<S>& t, int raw, double lo, double hi, double init) {
  double p0 = (init - lo) / (hi - lo);
  double bias = std::log(p0 / (1.0 - p0));
  // logistic(x) = (tanh(x/2) + 1) / 2
  int half = t.affine(raw, S(0.5), static_cast<S>(0.5 * bias));
  return t.affine(t.tanh_(half), static_cast<S>(0.5 * (hi - lo)),
                  static_cast<S>(0.5 * (hi + lo)));
}

}  // namespace detail

template <class S>
MatT<S> HWModel<S>::glorot(int rows, int cols, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  double lim = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> dist(-lim, lim);
  MatT<S> m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = static_cast<S>(dist(rng));
  return m;
}

template <class S>
void HWModel<S>::init_params(std::uint64_t seed) {
  auto named_glorot = [&](const std::string& name, int r, int c) {
    params_.add(name, glorot(r, c, split_seed(seed, name)));
  };
  auto zeros = [&](const std::string& name, int r, int c) {
    params_.add(name, MatT<S>::Zero(r, c));
  };

  named_glorot("proj.w", input_dim_, cfg_.hidden);
  zeros("proj.b", 1, cfg_.hidden);
  for (int b = 0; b < cfg_.blocks; ++b) {
    std::string p = "block" + std::to_string(b) + ".";
    if (cfg_.variant == Variant::windowed) {
      for (const char* net : {"mlp_omega.", "mlp_sigma."}) {
        named_glorot(p + net + "w1", 2, cfg_.mlp_hidden);
        zeros(p + net + "b1", 1, cfg_.mlp_hidden);
        named_glorot(p + net + "w2", cfg_.mlp_hidden, cfg_.mlp_hidden);
        zeros(p + net + "b2", 1, cfg_.mlp_hidden);
        zeros(p + net + "w3", cfg_.mlp_hidden, 1);  // zero final layer
        zeros(p + net + "b3", 1, 1);
      }
    } else {
      params_.add(p + "coeffs", MatT<S>::Ones(cfg_.order + 1, 1));
    }
    int S_eff = cfg_.variant == Variant::windowed ? cfg_.window_count : 1;
    zeros(p + "logits", S_eff, 1);
    for (int s = 0; s < S_eff; ++s)
      named_glorot(p + "win" + std::to_string(s) + ".w", cfg_.hidden, cfg_.hidden);
  }
  named_glorot("head.w", cfg_.hidden, 2);
  zeros("head.b", 1, 2);
}

template <class S>
typename HWModel<S>::BlockNodes HWModel<S>::build_bank(ad::Tape<S>& tape, int block, double h,
                                                       const std::vector<int>& pnodes) const {
  BlockNodes bn;
  std::string p = "block" + std::to_string(block) + ".";
  const int S_eff = cfg_.variant == Variant::windowed ? cfg_.window_count : 1;
  bn.weights = tape.softmax_vec(param_node(pnodes, p + "logits"));
  for (int s = 0; s < S_eff; ++s)
    bn.win_w.push_back(param_node(pnodes, p + "win" + std::to_string(s) + ".w"));

  if (cfg_.variant == Variant::plain) {
    bn.coeffs.push_back(param_node(pnodes, p + "coeffs"));
    return bn;
  }

  double h_input = cfg_.homophily_aware ? h : 0.5;
  double omega_bar = target_frequency(h_input);
  Vec centers = initial_centers(cfg_.window_count);
  double delta = cfg_.clip_scale / cfg_.window_count;
  for (int s = 0; s < cfg_.window_count; ++s) {
    MatT<S> in(1, 2);
    in(0, 0) = static_cast<S>(omega_bar);
    in(0, 1) = static_cast<S>((s + 0.5) / cfg_.window_count);
    int input = tape.leaf(in);
    int raw_o = detail::mlp_scalar(tape, input, param_node(pnodes, p + "mlp_omega.w1"),
                                   param_node(pnodes, p + "mlp_omega.b1"),
                                   param_node(pnodes, p + "mlp_omega.w2"),
                                   param_node(pnodes, p + "mlp_omega.b2"),
                                   param_node(pnodes, p + "mlp_omega.w3"),
                                   param_node(pnodes, p + "mlp_omega.b3"));
    int raw_s = detail::mlp_scalar(tape, input, param_node(pnodes, p + "mlp_sigma.w1"),
                                   param_node(pnodes, p + "mlp_sigma.b1"),
                                   param_node(pnodes, p + "mlp_sigma.w2"),
                                   param_node(pnodes, p + "mlp_sigma.b2"),
                                   param_node(pnodes, p + "mlp_sigma.w3"),
                                   param_node(pnodes, p + "mlp_sigma.b3"));
    int omega = detail::squash_logistic(tape, raw_o, std::max(0.0, centers[s] - delta),
                                        std::min(2.0, centers[s] + delta), centers[s]);
    int sigma =
        detail::squash_logistic(tape, raw_s, cfg_.sigma_min, cfg_.sigma_max, cfg_.sigma_init);
    bn.omega_nodes.push_back(omega);
    bn.sigma_nodes.push_back(sigma);
    // mass-normalized responses keep every window's amplitude O(1); the raw
    // overlap scale is absorbed into W_s
    bn.coeffs.push_back(tape.window_coeffs(omega, sigma, table_, /*normalized=*/true));
  }
  bn.omega_hat = tape.dot(bn.weights, tape.pack_scalars(bn.omega_nodes));
  return bn;
}

template <class S>
WindowBank HWModel<S>::snapshot_bank(const ad::Tape<S>& tape, const BlockNodes& bn,
                                     int block) const {
  WindowBank bank;
  const int S_eff = static_cast<int>(bn.coeffs.size());
  bank.coeffs = Mat::Zero(S_eff, cfg_.order + 1);
  bank.weights = tape.val(bn.weights).template cast<double>();
  bank.logits = params_.at("block" + std::to_string(block) + ".logits").template cast<double>();
  bank.mass = Vec::Ones(S_eff);
  if (cfg_.variant == Variant::plain) {
    bank.coeffs.row(0) =
        tape.val(bn.coeffs[0]).template cast<double>().transpose();
    return bank;
  }
  for (int s = 0; s < S_eff; ++s) {
    GaussianWindow w{static_cast<double>(tape.scalar(bn.omega_nodes[static_cast<size_t>(s)])),
                     static_cast<double>(tape.scalar(bn.sigma_nodes[static_cast<size_t>(s)]))};
    bank.windows.push_back(w);
    // raw overlap integrals for reporting; the conv consumed the
    // mass-normalized form, so mass lets callers reconstruct the applied mixing.
    bank.coeffs.row(s) = window_coefficients_grad(w, table_, false).c.transpose();
    bank.mass[s] = window_mass(w, table_.quad);
  }
  return bank;
}

template <class S>
ForwardResult<S> HWModel<S>::forward(ad::Tape<S>& tape, const Laplacian& lap, const MatT<S>& X,
                                     double h, const std::vector<std::int8_t>& labels,
                                     const std::vector<int>& train_mask, bool with_loss) const {
  ForwardResult<S> res;
  for (const auto& entry : params_.items) res.param_nodes.push_back(tape.leaf(entry.value));

  int x_id = tape.leaf(X);
  int H = tape.add_rowvec(tape.matmul(x_id, param_node(res.param_nodes, "proj.w")),
                          param_node(res.param_nodes, "proj.b"));
  res.named_nodes.emplace_back("proj", H);

  double h_input = cfg_.homophily_aware ? h : 0.5;
  double omega_bar = target_frequency(h_input);
  std::vector<int> omega_hat_nodes;
  for (int b = 0; b < cfg_.blocks; ++b) {
    BlockNodes bn = build_bank(tape, b, h, res.param_nodes);
    int conv = tape.windowed_conv(H, bn.coeffs, bn.weights, bn.win_w, lap, basis_);
    res.named_nodes.emplace_back("block" + std::to_string(b) + ".conv", conv);
    int pre = tape.add(H, conv);
    H = cfg_.activation == Activation::relu ? tape.relu_(pre) : tape.tanh_(pre);
    res.named_nodes.emplace_back("block" + std::to_string(b) + ".out", H);

    if (cfg_.variant == Variant::windowed) {
      omega_hat_nodes.push_back(bn.omega_hat);
      res.omega_hat.push_back(static_cast<double>(tape.scalar(bn.omega_hat)));
    }
    res.banks.push_back(snapshot_bank(tape, bn, b));
  }

  res.logits = tape.add_rowvec(tape.matmul(H, param_node(res.param_nodes, "head.w")),
                               param_node(res.param_nodes, "head.b"));
  res.named_nodes.emplace_back("logits", res.logits);
  if (!with_loss) return res;

  res.focal = tape.focal_loss(res.logits, labels, train_mask, static_cast<S>(cfg_.alpha),
                              static_cast<S>(cfg_.gamma));
  res.named_nodes.emplace_back("focal", res.focal);

  if (cfg_.variant == Variant::windowed && cfg_.blocks > 0) {
    int acc = -1;
    for (int node : omega_hat_nodes) {
      int dev = tape.affine(node, S(1), static_cast<S>(-omega_bar));
      int sq = tape.cmul(dev, dev);
      acc = acc < 0 ? sq : tape.add(acc, sq);
    }
    res.freq = tape.scale(acc, static_cast<S>(1.0 / cfg_.blocks));
  } else {
    res.freq = tape.leaf(MatT<S>::Zero(1, 1));
  }
  res.named_nodes.emplace_back("freq", res.freq);

  res.loss = tape.add(res.focal, tape.scale(res.freq, static_cast<S>(cfg_.lambda_f)));
  res.named_nodes.emplace_back("loss", res.loss);
  return res;
}

template <class S>
MatT<S> HWModel<S>::predict(const Laplacian& lap, const MatT<S>& X, double h) const {
  ad::Tape<S> tape(false);
  ForwardResult<S> res = forward(tape, lap, X, h, {}, {}, false);
  Mat probs = softmax_rows(tape.val(res.logits).template cast<double>());
  return probs.cast<S>();
}

template <class S>
std::vector<WindowBank> HWModel<S>::window_banks(double h) const {
  ad::Tape<S> tape(false);
  std::vector<int> pnodes;
  for (const auto& entry : params_.items) pnodes.push_back(tape.leaf(entry.value));
  std::vector<WindowBank> banks;
  for (int b = 0; b < cfg_.blocks; ++b)
    banks.push_back(snapshot_bank(tape, build_bank(tape, b, h, pnodes), b));
  return banks;
}

template <class S>
MatT<S> HWModel<S>::hwconv(int block, const Laplacian& lap, const MatT<S>& H, double h) const {
  ad::Tape<S> tape(false);
  std::vector<int> pnodes;
  for (const auto& entry : params_.items) pnodes.push_back(tape.leaf(entry.value));
  BlockNodes bn = build_bank(tape, block, h, pnodes);
  int conv = tape.windowed_conv(tape.leaf(H), bn.coeffs, bn.weights, bn.win_w, lap, basis_);
  return tape.val(conv);
}

inline std::vector<GaussianWindow> produce_windows(const WindowMlps& mlps, double h, int S,
                                                   double sigma_min, double sigma_max,
                                                   double sigma_init, double clip_scale) {
  if (S < 1) throw ConfigError("window count must be >= 1");
  ad::Tape<double> tape(false);
  auto put = [&](const Mat& m) { return tape.leaf(m); };
  int ow1 = put(mlps.omega.w1), ob1 = put(mlps.omega.b1), ow2 = put(mlps.omega.w2),
      ob2 = put(mlps.omega.b2), ow3 = put(mlps.omega.w3), ob3 = put(mlps.omega.b3);
  int sw1 = put(mlps.sigma.w1), sb1 = put(mlps.sigma.b1), sw2 = put(mlps.sigma.w2),
      sb2 = put(mlps.sigma.b2), sw3 = put(mlps.sigma.w3), sb3 = put(mlps.sigma.b3);
  double omega_bar = target_frequency(h);
  Vec centers = initial_centers(S);
  double delta = clip_scale / S;
  std::vector<GaussianWindow> out;
  for (int s = 0; s < S; ++s) {
    Mat in(1, 2);
    in << omega_bar, (s + 0.5) / S;
    int input = tape.leaf(in);
    int raw_o = detail::mlp_scalar(tape, input, ow1, ob1, ow2, ob2, ow3, ob3);
    int raw_s = detail::mlp_scalar(tape, input, sw1, sb1, sw2, sb2, sw3, sb3);
    double omega = tape.scalar(detail::squash_logistic(
        tape, raw_o, std::max(0.0, centers[s] - delta), std::min(2.0, centers[s] + delta),
        centers[s]));
    double sigma =
        tape.scalar(detail::squash_logistic(tape, raw_s, sigma_min, sigma_max, sigma_init));
    out.push_back(GaussianWindow{omega, sigma});
  }
  return out;
}

inline Mat softmax_rows(const Mat& logits) {
  Mat probs(logits.rows(), logits.cols());
  for (int i = 0; i < logits.rows(); ++i) {
    double m = logits.row(i).maxCoeff();
    Eigen::ArrayXd e = (logits.row(i).array() - m).exp();
    probs.row(i) = (e / e.sum()).matrix();
  }
  return probs;
}

inline double focal_loss_value(const Mat& probs, const std::vector<std::int8_t>& labels,
                               const std::vector<int>& mask, double alpha, double gamma) {
  if (mask.empty()) throw std::invalid_argument("focal loss over empty mask");
  double total = 0.0;
  for (int i : mask) {
    int y = labels[static_cast<size_t>(i)];
    double p = std::max(probs(i, y), 1e-300);
    double a = (alpha > 0.0 && alpha < 1.0) ? (y == 1 ? alpha : 1.0 - alpha) : 1.0;
    total += -a * std::pow(1.0 - p, gamma) * std::log(p);
  }
  return total / static_cast<double>(mask.size());
}

}  // namespace hwgnn
