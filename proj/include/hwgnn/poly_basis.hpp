#pragma once

#include <string>
#include <vector>

#include "hwgnn/graph.hpp"
#include "hwgnn/types.hpp"

namespace hwgnn {

enum class BasisKind { bernstein, jacobi, beta };

BasisKind basis_kind_from_string(const std::string& name);
std::string to_string(BasisKind kind);

/// Polynomial basis family {P_k^(K)} on the Laplacian spectrum [0, 2].
///
/// Bernstein follows the construction on [0,2] (C(K,k)(l/2)^k (1-l/2)^{K-k}),
/// Jacobi is J_k^{(a,b)}(1-l) via the three-term recurrence, and the beta
/// kernels are the diagonal i+j=K family l^k (2-l)^{K-k} / (2^{K+1} B(k+1,K-k+1)).
class PolyBasis {
 public:
  PolyBasis(BasisKind kind, int order, double jacobi_a = 1.0, double jacobi_b = 1.0);

  BasisKind kind() const { return kind_; }
  int order() const { return order_; }
  int size() const { return order_ + 1; }

  /// Pointwise P_k(lambda). Throws std::invalid_argument for k outside [0, K].
  double eval(int k, double lambda) const;

  /// Coefficients a[k][j] of P_k in powers of t = lambda - 1; the shifted
  /// variable keeps |t| <= 1 on the spectrum so the shared-power scheme stays
  /// well conditioned.
  const Mat& shifted_monomial_coeffs() const { return coeffs_; }

  /// All K+1 matrices P_k(L) X using exactly K sparse products total: powers
  /// T_j = (L - I)^j X are built once and combined per k.
  template <class S>
  std::vector<MatT<S>> apply(const Laplacian& lap, const MatT<S>& X) const;

 private:
  BasisKind kind_;
  int order_;
  double a_, b_;
  Mat coeffs_;  // (K+1) x (K+1)

  void build_coeffs();
};

}  // namespace hwgnn
