#include "hwgnn/spectral.hpp"

#include <Eigen/Dense>

namespace hwgnn {

EigenDecomposition dense_spectrum(const Laplacian& lap) {
  if (lap.n > kOracleSizeCap)
    throw DataError("spectral oracle cap exceeded (n=" + std::to_string(lap.n) + " > " +
                    std::to_string(kOracleSizeCap) + ")");
  Eigen::MatrixXd L = lap.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L);
  if (solver.info() != Eigen::Success) throw DataError("eigendecomposition failed");
  EigenDecomposition d;
  d.eigenvalues = solver.eigenvalues();
  d.eigenvectors = solver.eigenvectors();
  return d;
}

Mat exact_filter_oracle(const Laplacian& lap, const std::function<double(double)>& response,
                        const Mat& X) {
  if (X.rows() != lap.n) throw std::invalid_argument("oracle: row count mismatch");
  EigenDecomposition d = dense_spectrum(lap);
  Mat out = Mat::Zero(X.rows(), X.cols());
  for (int i = 0; i < lap.n; ++i) {
    Vec u = d.eigenvectors.col(i);
    out += response(d.eigenvalues[i]) * (u * (u.transpose() * X));
  }
  return out;
}

std::vector<std::pair<double, double>> spectral_energy_profile(const Laplacian& lap,
                                                               const Vec& signal) {
  if (signal.size() != lap.n) throw std::invalid_argument("energy profile: size mismatch");
  EigenDecomposition d = dense_spectrum(lap);
  std::vector<std::pair<double, double>> profile;
  profile.reserve(static_cast<size_t>(lap.n));
  for (int i = 0; i < lap.n; ++i) {
    double coeff = d.eigenvectors.col(i).dot(signal);
    profile.emplace_back(d.eigenvalues[i], coeff * coeff);
  }
  // SelfAdjointEigenSolver already sorts ascending.
  return profile;
}

double high_frequency_share(const std::vector<std::pair<double, double>>& profile,
                            double threshold) {
  double total = 0.0, high = 0.0;
  for (auto [lambda, energy] : profile) {
    total += energy;
    if (lambda > threshold) high += energy;
  }
  return total > 0.0 ? high / total : 0.0;
}

}  // namespace hwgnn
