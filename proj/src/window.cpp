#include "hwgnn/window.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace hwgnn {

double target_frequency(double h) {
  if (h < 0.0 || h > 1.0) throw ConfigError("homophily ratio outside [0,1]");
  return 2.0 * (1.0 - h);
}

Quadrature Quadrature::composite_simpson(int node_count) {
  if (node_count < 3 || node_count % 2 == 0)
    throw std::invalid_argument("composite Simpson needs an odd node count >= 3");
  Quadrature q;
  q.nodes = Vec::LinSpaced(node_count, 0.0, 2.0);
  q.weights = Vec::Zero(node_count);
  double h = 2.0 / (node_count - 1);
  for (int i = 0; i < node_count; ++i) {
    double w = (i == 0 || i == node_count - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    q.weights[i] = w * h / 3.0;
  }
  return q;
}

Quadrature Quadrature::trapezoid(int node_count) {
  if (node_count < 2) throw std::invalid_argument("trapezoid needs >= 2 nodes");
  Quadrature q;
  q.nodes = Vec::LinSpaced(node_count, 0.0, 2.0);
  double h = 2.0 / (node_count - 1);
  q.weights = Vec::Constant(node_count, h);
  q.weights[0] = q.weights[node_count - 1] = h / 2.0;
  return q;
}

const Quadrature& Quadrature::default_scheme() {
  static const Quadrature q = composite_simpson(2049);
  return q;
}

CoeffMode coeff_mode_from_string(const std::string& name) {
  if (name == "overlap") return CoeffMode::overlap;
  if (name == "projection") return CoeffMode::projection;
  throw ConfigError("unknown coeff mode: " + name);
}

std::string to_string(CoeffMode mode) {
  return mode == CoeffMode::overlap ? "overlap" : "projection";
}

BasisTable::BasisTable(PolyBasis b, Quadrature q, CoeffMode mode)
    : basis(std::move(b)), quad(std::move(q)) {
  const int K = basis.order();
  const int Q = static_cast<int>(quad.nodes.size());
  values = Mat::Zero(K + 1, Q);
  for (int k = 0; k <= K; ++k)
    for (int i = 0; i < Q; ++i) values(k, i) = basis.eval(k, quad.nodes[i]);
  if (mode == CoeffMode::overlap) {
    coeff_map = Mat::Identity(K + 1, K + 1);
  } else {
    // Gram-matrix least squares on the quadrature grid.
    Mat gram = values * quad.weights.asDiagonal() * values.transpose();
    Eigen::MatrixXd inv = Eigen::MatrixXd(gram).ldlt().solve(Eigen::MatrixXd::Identity(K + 1, K + 1));
    coeff_map = inv;
  }
}

WindowCoefficients window_coefficients_grad(const GaussianWindow& w, const BasisTable& table,
                                            bool normalized) {
  if (w.sigma <= 0.0) throw std::invalid_argument("window sigma must be positive");
  const Vec& x = table.quad.nodes;
  const int Q = static_cast<int>(x.size());
  Vec g(Q), g_dw(Q), g_ds(Q);
  double inv_s2 = 1.0 / (w.sigma * w.sigma);
  for (int i = 0; i < Q; ++i) {
    double d = x[i] - w.omega;
    double v = std::exp(-0.5 * d * d * inv_s2);
    g[i] = v * table.quad.weights[i];
    g_dw[i] = g[i] * d * inv_s2;
    g_ds[i] = g[i] * d * d * inv_s2 / w.sigma;
  }
  WindowCoefficients out;
  out.c = table.coeff_map * (table.values * g);
  out.d_omega = table.coeff_map * (table.values * g_dw);
  out.d_sigma = table.coeff_map * (table.values * g_ds);
  if (normalized) {
    // quotient rule on the same discrete sums: mass m = sum of g
    double m = g.sum();
    double dm_o = g_dw.sum(), dm_s = g_ds.sum();
    out.d_omega = out.d_omega / m - out.c * (dm_o / (m * m));
    out.d_sigma = out.d_sigma / m - out.c * (dm_s / (m * m));
    out.c /= m;
  }
  return out;
}

Vec window_coefficients(const GaussianWindow& w, const PolyBasis& basis) {
  BasisTable table(basis, Quadrature::default_scheme(), CoeffMode::overlap);
  return window_coefficients_grad(w, table).c;
}

double gaussian_window_integral(const GaussianWindow& w) {
  auto phi = [](double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); };
  return w.sigma * std::sqrt(2.0 * M_PI) *
         (phi((2.0 - w.omega) / w.sigma) - phi((0.0 - w.omega) / w.sigma));
}

double window_mass(const GaussianWindow& w, const Quadrature& quad) {
  double m = 0.0;
  for (int i = 0; i < quad.nodes.size(); ++i) m += w.eval(quad.nodes[i]) * quad.weights[i];
  return m;
}

double WindowBank::weighted_center() const {
  double c = 0.0;
  for (int s = 0; s < window_count(); ++s) c += weights[s] * windows[static_cast<size_t>(s)].omega;
  return c;
}

std::pair<Mat, Vec> effective_response(const WindowBank& bank, const PolyBasis& basis,
                                       const Vec& grid) {
  const int S = bank.window_count();
  const int G = static_cast<int>(grid.size());
  const int K = basis.order();
  Mat per_window = Mat::Zero(S, G);
  for (int i = 0; i < G; ++i) {
    if (grid[i] < 0.0 || grid[i] > 2.0) throw std::invalid_argument("grid point outside [0,2]");
    for (int k = 0; k <= K; ++k) {
      double p = basis.eval(k, grid[i]);
      for (int s = 0; s < S; ++s) per_window(s, i) += bank.coeffs(s, k) * p;
    }
  }
  Vec combined = Vec::Zero(G);
  for (int s = 0; s < S; ++s) combined += bank.weights[s] * per_window.row(s).transpose();
  return {per_window, combined};
}

Vec initial_centers(int S) {
  if (S < 1) throw ConfigError("window count must be >= 1");
  Vec c(S);
  for (int s = 1; s <= S; ++s) c[s - 1] = 2.0 * (s - 0.5) / S;
  return c;
}

}  // namespace hwgnn
