#include "hwgnn/poly_basis.hpp"

#include <cmath>
#include <stdexcept>

namespace hwgnn {

namespace {

// Binomial coefficients switch to log-space above this order to survive the
// sensitivity sweeps without overflow.
constexpr int kLogSpaceOrder = 20;

double binomial(int n, int k) {
  if (n >= kLogSpaceOrder)
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// 1 / (2^{K+1} B(k+1, K-k+1)) = (K+1) C(K,k) / 2^{K+1}
double beta_normalizer(int order, int k) {
  if (order >= kLogSpaceOrder)
    return std::exp(std::lgamma(order + 2.0) - std::lgamma(k + 1.0) -
                    std::lgamma(order - k + 1.0) - (order + 1.0) * std::log(2.0));
  return (order + 1.0) * binomial(order, k) / std::ldexp(1.0, order + 1);
}

// Coefficient vectors of (1+t)^k (1-t)^{K-k} in powers of t.
Vec plus_minus_expansion(int order, int k) {
  Vec out = Vec::Zero(order + 1);
  for (int i = 0; i <= k; ++i) {
    double ci = binomial(k, i);
    for (int m = 0; m <= order - k; ++m) {
      double sign = (m % 2 == 0) ? 1.0 : -1.0;
      out[i + m] += ci * binomial(order - k, m) * sign;
    }
  }
  return out;
}

}  // namespace

BasisKind basis_kind_from_string(const std::string& name) {
  if (name == "bernstein") return BasisKind::bernstein;
  if (name == "jacobi") return BasisKind::jacobi;
  if (name == "beta") return BasisKind::beta;
  throw ConfigError("unknown basis kind: " + name);
}

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::bernstein: return "bernstein";
    case BasisKind::jacobi: return "jacobi";
    case BasisKind::beta: return "beta";
  }
  return "?";
}

PolyBasis::PolyBasis(BasisKind kind, int order, double jacobi_a, double jacobi_b)
    : kind_(kind), order_(order), a_(jacobi_a), b_(jacobi_b) {
  if (order < 0) throw ConfigError("polynomial order must be non-negative");
  build_coeffs();
}

double PolyBasis::eval(int k, double lambda) const {
  if (k < 0 || k > order_) throw std::invalid_argument("basis index out of range");
  switch (kind_) {
    case BasisKind::bernstein: {
      double x = lambda / 2.0;
      return binomial(order_, k) * std::pow(x, k) * std::pow(1.0 - x, order_ - k);
    }
    case BasisKind::beta:
      return beta_normalizer(order_, k) * std::pow(lambda, k) * std::pow(2.0 - lambda, order_ - k);
    case BasisKind::jacobi: {
      // J_k^{(a,b)} evaluated at u = 1 - lambda, standard three-term recurrence.
      double u = 1.0 - lambda;
      if (k == 0) return 1.0;
      double pkm1 = 1.0;
      double pk = 0.5 * ((a_ + b_ + 2.0) * u + (a_ - b_));
      for (int m = 2; m <= k; ++m) {
        double c = 2.0 * m + a_ + b_;
        double denom = 2.0 * m * (m + a_ + b_) * (c - 2.0);
        double alpha = (c - 1.0) * c * (c - 2.0);
        double beta = (c - 1.0) * (a_ * a_ - b_ * b_);
        double gamma = 2.0 * (m + a_ - 1.0) * (m + b_ - 1.0) * c;
        double next = ((alpha * u + beta) * pk - gamma * pkm1) / denom;
        pkm1 = pk;
        pk = next;
      }
      return pk;
    }
  }
  return 0.0;
}

void PolyBasis::build_coeffs() {
  const int K = order_;
  coeffs_ = Mat::Zero(K + 1, K + 1);
  switch (kind_) {
    case BasisKind::bernstein:
    case BasisKind::beta: {
      // C(K,k) 2^{-K} (1+t)^k (1-t)^{K-k}; beta scales the same row.
      for (int k = 0; k <= K; ++k) {
        double scale = kind_ == BasisKind::bernstein
                           ? binomial(K, k) * std::exp(-K * std::log(2.0))
                           : beta_normalizer(K, k);
        coeffs_.row(k) = (scale * plus_minus_expansion(K, k)).transpose();
      }
      break;
    }
    case BasisKind::jacobi: {
      // Recurrence on coefficient vectors in u, then u^j = (-t)^j.
      Mat cu = Mat::Zero(K + 1, K + 1);
      cu(0, 0) = 1.0;
      if (K >= 1) {
        cu(1, 0) = 0.5 * (a_ - b_);
        cu(1, 1) = 0.5 * (a_ + b_ + 2.0);
      }
      for (int m = 2; m <= K; ++m) {
        double c = 2.0 * m + a_ + b_;
        double denom = 2.0 * m * (m + a_ + b_) * (c - 2.0);
        double alpha = (c - 1.0) * c * (c - 2.0);
        double beta = (c - 1.0) * (a_ * a_ - b_ * b_);
        double gamma = 2.0 * (m + a_ - 1.0) * (m + b_ - 1.0) * c;
        for (int j = 0; j <= m; ++j) {
          double val = beta * cu(m - 1, j) - gamma * cu(m - 2, j);
          if (j > 0) val += alpha * cu(m - 1, j - 1);
          cu(m, j) = val / denom;
        }
      }
      for (int k = 0; k <= K; ++k)
        for (int j = 0; j <= K; ++j)
          coeffs_(k, j) = cu(k, j) * ((j % 2 == 0) ? 1.0 : -1.0);
      break;
    }
  }
}

template <class S>
std::vector<MatT<S>> PolyBasis::apply(const Laplacian& lap, const MatT<S>& X) const {
  if (X.rows() != lap.n) throw std::invalid_argument("apply_basis: dimension mismatch");
  const int K = order_;
  std::vector<MatT<S>> out(static_cast<size_t>(K) + 1);
  for (int k = 0; k <= K; ++k)
    out[static_cast<size_t>(k)] = static_cast<S>(coeffs_(k, 0)) * X;
  MatT<S> power = X;  // T_j = (L - I)^j X
  for (int j = 1; j <= K; ++j) {
    power = lap.spmm(power) - power;
    for (int k = 0; k <= K; ++k) {
      double a = coeffs_(k, j);
      if (a != 0.0) out[static_cast<size_t>(k)] += static_cast<S>(a) * power;
    }
  }
  return out;
}

template std::vector<MatT<double>> PolyBasis::apply<double>(const Laplacian&,
                                                            const MatT<double>&) const;
template std::vector<MatT<float>> PolyBasis::apply<float>(const Laplacian&,
                                                          const MatT<float>&) const;

}  // namespace hwgnn
