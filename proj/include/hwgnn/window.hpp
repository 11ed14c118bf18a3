#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "hwgnn/errors.hpp"
#include "hwgnn/poly_basis.hpp"
#include "hwgnn/types.hpp"

namespace hwgnn {

constexpr double kSigmaMin = 0.05;
constexpr double kSigmaMax = 1.0;

/// Gaussian spectral mask exp(-(lambda-omega)^2 / (2 sigma^2)).
struct GaussianWindow {
  double omega = 1.0;
  double sigma = 0.5;

  double eval(double lambda) const {
    double z = (lambda - omega) / sigma;
    return std::exp(-0.5 * z * z);
  }
};

/// Expected anomaly center frequency: 2 (1 - h). Strictly decreasing in h.
double target_frequency(double h);

/// Fixed quadrature nodes/weights on [0, 2]. Nodes never move, so the
/// computed coefficients stay differentiable in (omega, sigma).
struct Quadrature {
  Vec nodes;
  Vec weights;

  static Quadrature composite_simpson(int node_count);  // node_count odd
  static Quadrature trapezoid(int node_count);
  static const Quadrature& default_scheme();            // Simpson, 2049 nodes
};

enum class CoeffMode { overlap, projection };

CoeffMode coeff_mode_from_string(const std::string& name);
std::string to_string(CoeffMode mode);

/// Basis sampled on a fixed quadrature plus the linear map that turns overlap
/// integrals into coefficients (identity for overlap mode, inverse Gram for
/// grid least-squares projection mode).
struct BasisTable {
  PolyBasis basis;
  Quadrature quad;
  Mat values;     // (K+1) x Q, values(k, q) = P_k(node_q)
  Mat coeff_map;  // (K+1) x (K+1)

  BasisTable(PolyBasis b, Quadrature q, CoeffMode mode);
};

struct WindowCoefficients {
  Vec c;         // K+1
  Vec d_omega;   // dc/domega
  Vec d_sigma;   // dc/dsigma
};

/// c_k = integral of G(lambda) P_k(lambda) over [0,2] on the table's fixed
/// scheme (then mapped through coeff_map), with exact derivatives of the
/// discrete sum w.r.t. the window parameters. With `normalized` the vector is
/// divided by the window mass integral of G on the same scheme, which keeps
/// the per-window response amplitude O(1) regardless of bandwidth; that is a
/// reparameterization of the downstream weight matrix, not a different
/// filter family.
WindowCoefficients window_coefficients_grad(const GaussianWindow& w, const BasisTable& table,
                                            bool normalized = false);

/// Convenience: overlap coefficients on the default scheme.
Vec window_coefficients(const GaussianWindow& w, const PolyBasis& basis);

/// Closed form of integral of G over [0,2] via the normal CDF; the Bernstein
/// partition of unity makes sum_k c_k equal this.
double gaussian_window_integral(const GaussianWindow& w);

/// Window mass on the table's discrete scheme (what the normalization uses).
double window_mass(const GaussianWindow& w, const Quadrature& quad);

/// Value snapshot of one convolution block's window bank. `coeffs` holds the
/// raw overlap integrals; `mass` the per-window normalizer folded into the
/// weight matrices during convolution (ones for the plain variant).
struct WindowBank {
  std::vector<GaussianWindow> windows;
  Mat coeffs;   // S x (K+1)
  Vec weights;  // softmax of logits, sums to 1
  Vec logits;
  Vec mass;

  int window_count() const { return static_cast<int>(windows.size()); }
  /// Importance-weighted mean center frequency (the block's omega-hat).
  double weighted_center() const;
};

/// Per-window responses g_s on the grid (S x |grid|) plus the combined
/// response sum_s w_s g_s.
std::pair<Mat, Vec> effective_response(const WindowBank& bank, const PolyBasis& basis,
                                       const Vec& grid);

/// Equally spaced initial centers 2(s - 1/2)/S for s = 1..S.
Vec initial_centers(int S);

}  // namespace hwgnn
