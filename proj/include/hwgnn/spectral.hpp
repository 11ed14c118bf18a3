#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "hwgnn/graph.hpp"
#include "hwgnn/types.hpp"

namespace hwgnn {

// The dense spectral path exists for verification only; the training pipeline
// never eigendecomposes. Capped so nobody reaches for it on a real graph.
constexpr int kOracleSizeCap = 512;

struct EigenDecomposition {
  Vec eigenvalues;    // ascending
  Mat eigenvectors;   // columns, orthonormal
};

/// Dense symmetric eigendecomposition of L. Throws DataError beyond the cap.
EigenDecomposition dense_spectrum(const Laplacian& lap);

/// g(L) X = sum_i response(lambda_i) u_i (u_i^T X), exact up to floating point.
Mat exact_filter_oracle(const Laplacian& lap, const std::function<double(double)>& response,
                        const Mat& X);

/// Per-eigenpair energy (lambda_i, |u_i^T signal|^2), sorted by lambda ascending.
std::vector<std::pair<double, double>> spectral_energy_profile(const Laplacian& lap,
                                                               const Vec& signal);

/// Share of spectral energy at lambda > threshold (diagnostic for the
/// homophily premise checks).
double high_frequency_share(const std::vector<std::pair<double, double>>& profile,
                            double threshold = 1.0);

}  // namespace hwgnn
