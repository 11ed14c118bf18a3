#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "hwgnn/graph.hpp"
#include "hwgnn/poly_basis.hpp"
#include "hwgnn/types.hpp"
#include "hwgnn/window.hpp"

namespace hwgnn::ad {

/// Minimal reverse-mode tape over dense matrices. Scalars are 1x1. Nodes are
/// created in topological order; backward() walks them in reverse. The few
/// structured operations the model needs (windowed spectral convolution,
/// window-coefficient quadrature, focal loss) are fused nodes with
/// hand-written adjoints, each checked against finite differences in tests.
template <class S>
class Tape {
 public:
  using M = MatT<S>;

  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool grad_enabled() const { return grad_enabled_; }

  int leaf(M v) {
    nodes_.push_back(Node{std::move(v), M(), nullptr});
    return static_cast<int>(nodes_.size()) - 1;
  }

  const M& val(int id) const { return nodes_[static_cast<size_t>(id)].val; }
  S scalar(int id) const { return nodes_[static_cast<size_t>(id)].val(0, 0); }

  /// Accumulated gradient; empty matrix when the node never received one.
  const M& grad(int id) const { return nodes_[static_cast<size_t>(id)].grad; }

  int matmul(int a, int b) {
    int out = leaf(val(a) * val(b));
    record(out, [this, a, b, out] {
      const M& g = nodes_[static_cast<size_t>(out)].grad;
      grad_ref(a) += g * val(b).transpose();
      grad_ref(b) += val(a).transpose() * g;
    });
    return out;
  }

  int add(int a, int b) {
    int out = leaf(val(a) + val(b));
    record(out, [this, a, b, out] {
      const M& g = nodes_[static_cast<size_t>(out)].grad;
      grad_ref(a) += g;
      grad_ref(b) += g;
    });
    return out;
  }

  int sub(int a, int b) {
    int out = leaf(val(a) - val(b));
    record(out, [this, a, b, out] {
      const M& g = nodes_[static_cast<size_t>(out)].grad;
      grad_ref(a) += g;
      grad_ref(b) -= g;
    });
    return out;
  }

  int cmul(int a, int b) {
    int out = leaf(val(a).cwiseProduct(val(b)));
    record(out, [this, a, b, out] {
      const M& g = nodes_[static_cast<size_t>(out)].grad;
      grad_ref(a) += g.cwiseProduct(val(b));
      grad_ref(b) += g.cwiseProduct(val(a));
    });
    return out;
  }

  int scale(int a, S c) { return affine(a, c, S(0)); }

  /// Elementwise m * a + c.
  int affine(int a, S m, S c) {
    int out = leaf((val(a).array() * m + c).matrix());
    record(out, [this, a, m, out] { grad_ref(a) += m * nodes_[static_cast<size_t>(out)].grad; });
    return out;
  }

  /// a (n x d) plus a broadcast row vector (1 x d).
  int add_rowvec(int a, int b) {
    M v = val(a);
    v.rowwise() += val(b).row(0);
    int out = leaf(std::move(v));
    record(out, [this, a, b, out] {
      const M& g = nodes_[static_cast<size_t>(out)].grad;
      grad_ref(a) += g;
      grad_ref(b) += g.colwise().sum();
    });
    return out;
  }

  int tanh_(int a) {
    int out = leaf(val(a).array().tanh().matrix());
    record(out, [this, a, out] {
      const M& y = nodes_[static_cast<size_t>(out)].val;
      const M& g = nodes_[static_cast<size_t>(out)].grad;
      grad_ref(a) += (g.array() * (1.0 - y.array().square())).matrix();
    });
    return out;
  }

  int relu_(int a) {
    int out = leaf(val(a).cwiseMax(S(0)));
    record(out, [this, a, out] {
      const M& x = nodes_[static_cast<size_t>(a)].val;
      const M& g = nodes_[static_cast<size_t>(out)].grad;
      grad_ref(a) += (x.array() > S(0)).template cast<S>().matrix().cwiseProduct(g);
    });
    return out;
  }

  int sum(int a) {
    M v(1, 1);
    v(0, 0) = val(a).sum();
    int out = leaf(std::move(v));
    record(out, [this, a, out] {
      grad_ref(a).array() += nodes_[static_cast<size_t>(out)].grad(0, 0);
    });
    return out;
  }

  int dot(int a, int b) {
    M v(1, 1);
    v(0, 0) = val(a).cwiseProduct(val(b)).sum();
    int out = leaf(std::move(v));
    record(out, [this, a, b, out] {
      S g = nodes_[static_cast<size_t>(out)].grad(0, 0);
      grad_ref(a) += g * val(b);
      grad_ref(b) += g * val(a);
    });
    return out;
  }

  /// Stack scalar nodes into a k x 1 column.
  int pack_scalars(const std::vector<int>& ids) {
    M v(static_cast<int>(ids.size()), 1);
    for (size_t i = 0; i < ids.size(); ++i) v(static_cast<int>(i), 0) = scalar(ids[i]);
    int out = leaf(std::move(v));
    record(out, [this, ids, out] {
      const M& g = nodes_[static_cast<size_t>(out)].grad;
      for (size_t i = 0; i < ids.size(); ++i)
        grad_ref(ids[i])(0, 0) += g(static_cast<int>(i), 0);
    });
    return out;
  }

  /// Softmax of a k x 1 column.
  int softmax_vec(int a) {
    const M& x = val(a);
    M y = (x.array() - x.maxCoeff()).exp().matrix();
    y /= y.sum();
    int out = leaf(std::move(y));
    record(out, [this, a, out] {
      const M& y2 = nodes_[static_cast<size_t>(out)].val;
      const M& g = nodes_[static_cast<size_t>(out)].grad;
      S inner = y2.cwiseProduct(g).sum();
      grad_ref(a) += y2.cwiseProduct(g - M::Constant(y2.rows(), 1, inner));
    });
    return out;
  }

  /// Mean focal loss over `mask` rows of 2-class logits:
  /// -(1/|mask|) sum alpha_i (1 - p_true)^gamma log p_true.
  /// alpha in (0,1) weights the classes alpha (class 1) / 1-alpha (class 0);
  /// any value outside (0,1) disables class weighting.
  int focal_loss(int logits, const std::vector<std::int8_t>& labels,
                 const std::vector<int>& mask, S alpha, S gamma) {
    if (mask.empty()) throw std::invalid_argument("focal loss over empty mask");
    const M& z = val(logits);
    const S inv_m = S(1) / static_cast<S>(mask.size());
    S total = 0;
    for (int i : mask) {
      int y = labels[static_cast<size_t>(i)];
      S m = std::max(z(i, 0), z(i, 1));
      S lse = m + std::log(std::exp(z(i, 0) - m) + std::exp(z(i, 1) - m));
      S logp = z(i, y) - lse;
      S p = std::exp(logp);
      S a = class_weight(alpha, y);
      total += -a * std::pow(S(1) - p, gamma) * logp;
    }
    M v(1, 1);
    v(0, 0) = total * inv_m;
    int out = leaf(std::move(v));
    record(out, [this, logits, labels, mask, alpha, gamma, inv_m, out] {
      S gout = nodes_[static_cast<size_t>(out)].grad(0, 0) * inv_m;
      const M& z2 = val(logits);
      M& gz = grad_ref(logits);
      for (int i : mask) {
        int y = labels[static_cast<size_t>(i)];
        S m = std::max(z2(i, 0), z2(i, 1));
        S e0 = std::exp(z2(i, 0) - m), e1 = std::exp(z2(i, 1) - m);
        S denom = e0 + e1;
        S p0 = e0 / denom, p1 = e1 / denom;
        S p = (y == 0) ? p0 : p1;
        S logp = std::log(p);
        S a = class_weight(alpha, y);
        // d/dp of -a (1-p)^gamma log p, times dp/dz = p (delta - p_j)
        S term = (gamma == S(0))
                     ? S(0)
                     : a * gamma * std::pow(S(1) - p, gamma - S(1)) * logp * p;
        S coef = term - a * std::pow(S(1) - p, gamma);
        gz(i, 0) += gout * coef * ((y == 0 ? S(1) : S(0)) - p0);
        gz(i, 1) += gout * coef * ((y == 1 ? S(1) : S(0)) - p1);
      }
    });
    return out;
  }

  /// Window overlap coefficients as a (K+1) x 1 node; gradients flow to the
  /// scalar (omega, sigma) nodes through the fixed quadrature.
  int window_coeffs(int omega, int sigma, const BasisTable& table, bool normalized = false) {
    GaussianWindow w{static_cast<double>(scalar(omega)), static_cast<double>(scalar(sigma))};
    WindowCoefficients wc = window_coefficients_grad(w, table, normalized);
    int out = leaf(wc.c.cast<S>());
    if (grad_enabled_) {
      auto dw = std::make_shared<std::pair<Vec, Vec>>(wc.d_omega, wc.d_sigma);
      record(out, [this, omega, sigma, dw, out] {
        const M& g = nodes_[static_cast<size_t>(out)].grad;
        S go = 0, gs = 0;
        for (int k = 0; k < g.rows(); ++k) {
          go += g(k, 0) * static_cast<S>(dw->first[k]);
          gs += g(k, 0) * static_cast<S>(dw->second[k]);
        }
        grad_ref(omega)(0, 0) += go;
        grad_ref(sigma)(0, 0) += gs;
      });
    }
    return out;
  }

  /// Gaussian-windowed spectral convolution
  ///   out = sum_s w_s sum_k c_{s,k} P_k(L) H W_s
  /// computed through shared powers T_j = (L-I)^j H, K sparse products total
  /// regardless of S. `coeffs[s]` are (K+1) x 1 nodes, `weights` an S x 1
  /// node, `Ws[s]` the per-window d x d' weight nodes.
  int windowed_conv(int H, const std::vector<int>& coeffs, int weights,
                    const std::vector<int>& Ws, const Laplacian& lap,
                    const PolyBasis& basis) {
    const int S_count = static_cast<int>(coeffs.size());
    const int K = basis.order();
    const Mat& A = basis.shifted_monomial_coeffs();  // (K+1) x (K+1)
    const M& Hv = val(H);
    if (Hv.rows() != lap.n) throw std::invalid_argument("windowed_conv: dimension mismatch");
    if (static_cast<int>(Ws.size()) != S_count || val(weights).rows() != S_count)
      throw std::invalid_argument("windowed_conv: window count mismatch");

    // chat(s, j) = sum_k c_{s,k} a_{k,j}: per-window combination in the
    // shared-power representation.
    M chat(S_count, K + 1);
    for (int s = 0; s < S_count; ++s) {
      const M& c = val(coeffs[static_cast<size_t>(s)]);
      if (c.rows() != K + 1) throw std::invalid_argument("windowed_conv: coeff length mismatch");
      for (int j = 0; j <= K; ++j) {
        S acc = 0;
        for (int k = 0; k <= K; ++k) acc += c(k, 0) * static_cast<S>(A(k, j));
        chat(s, j) = acc;
      }
    }

    // TODO: stream the powers through two buffers in no-grad mode instead of
    // materializing all K+1; only matters for very large graphs.
    auto powers = std::make_shared<std::vector<M>>();
    powers->reserve(static_cast<size_t>(K) + 1);
    powers->push_back(Hv);
    for (int j = 1; j <= K; ++j) {
      M next = lap.spmm(powers->back()) - powers->back();
      powers->push_back(std::move(next));
    }

    const M& wv = val(weights);
    M out_val;
    for (int s = 0; s < S_count; ++s) {
      M mix = chat(s, 0) * (*powers)[0];
      for (int j = 1; j <= K; ++j)
        if (chat(s, j) != S(0)) mix += chat(s, j) * (*powers)[static_cast<size_t>(j)];
      M contrib = wv(s, 0) * (mix * val(Ws[static_cast<size_t>(s)]));
      if (s == 0)
        out_val = std::move(contrib);
      else
        out_val += contrib;
    }
    int out = leaf(std::move(out_val));

    if (grad_enabled_) {
      std::vector<int> coeff_ids = coeffs;
      std::vector<int> w_ids = Ws;
      auto chat_copy = std::make_shared<M>(std::move(chat));
      const Laplacian* lap_ptr = &lap;
      const Mat* A_ptr = &A;
      record(out, [this, H, coeff_ids, weights, w_ids, powers, chat_copy, lap_ptr, A_ptr, K,
                   S_count, out] {
        const M& g = nodes_[static_cast<size_t>(out)].grad;
        const M& wv2 = val(weights);
        std::vector<M> Dj(static_cast<size_t>(K) + 1);
        for (int s = 0; s < S_count; ++s) {
          M As = g * val(w_ids[static_cast<size_t>(s)]).transpose();  // n x d
          // m_j = <T_j, A_s>
          VecT<S> m(K + 1);
          for (int j = 0; j <= K; ++j)
            m[j] = (*powers)[static_cast<size_t>(j)].cwiseProduct(As).sum();
          // coefficient gradient: dc_{s,k} = w_s sum_j a_{k,j} m_j
          M& gc = grad_ref(coeff_ids[static_cast<size_t>(s)]);
          for (int k = 0; k <= K; ++k) {
            S acc = 0;
            for (int j = 0; j <= K; ++j) acc += static_cast<S>((*A_ptr)(k, j)) * m[j];
            gc(k, 0) += wv2(s, 0) * acc;
          }
          // mixture weight gradient: <M_s W_s, g> = sum_j chat_{s,j} m_j
          S gws = 0;
          for (int j = 0; j <= K; ++j) gws += (*chat_copy)(s, j) * m[j];
          grad_ref(weights)(s, 0) += gws;
          // W_s gradient needs M_s = sum_j chat_{s,j} T_j
          M mix = (*chat_copy)(s, 0) * (*powers)[0];
          for (int j = 1; j <= K; ++j)
            if ((*chat_copy)(s, j) != S(0)) mix += (*chat_copy)(s, j) * (*powers)[static_cast<size_t>(j)];
          grad_ref(w_ids[static_cast<size_t>(s)]) += wv2(s, 0) * (mix.transpose() * g);
          // input gradient accumulators D_j = sum_s w_s chat_{s,j} A_s
          for (int j = 0; j <= K; ++j) {
            S cj = wv2(s, 0) * (*chat_copy)(s, j);
            if (Dj[static_cast<size_t>(j)].size() == 0)
              Dj[static_cast<size_t>(j)] = cj * As;
            else
              Dj[static_cast<size_t>(j)] += cj * As;
          }
        }
        // dH = sum_j (L - I)^j D_j via Horner; (L - I) is symmetric.
        M R = Dj[static_cast<size_t>(K)];
        for (int j = K - 1; j >= 0; --j) {
          R = lap_ptr->spmm(R) - R;
          R += Dj[static_cast<size_t>(j)];
        }
        grad_ref(H) += R;
      });
    }
    return out;
  }

  /// Seeds root with ones and propagates. Root is typically the 1x1 loss.
  void backward(int root) {
    if (!grad_enabled_) throw std::logic_error("backward on a no-grad tape");
    auto& r = nodes_[static_cast<size_t>(root)];
    r.grad = M::Ones(r.val.rows(), r.val.cols());
    for (int i = root; i >= 0; --i) {
      Node& nd = nodes_[static_cast<size_t>(i)];
      if (nd.back && nd.grad.size() != 0) nd.back();
    }
  }

 private:
  struct Node {
    M val;
    M grad;
    std::function<void()> back;
  };

  static S class_weight(S alpha, int y) {
    if (!(alpha > S(0) && alpha < S(1))) return S(1);
    return y == 1 ? alpha : S(1) - alpha;
  }

  M& grad_ref(int id) {
    Node& nd = nodes_[static_cast<size_t>(id)];
    if (nd.grad.size() == 0) nd.grad = M::Zero(nd.val.rows(), nd.val.cols());
    return nd.grad;
  }

  void record(int id, std::function<void()> back) {
    if (grad_enabled_) nodes_[static_cast<size_t>(id)].back = std::move(back);
  }

  std::vector<Node> nodes_;
  bool grad_enabled_;
};

}  // namespace hwgnn::ad
