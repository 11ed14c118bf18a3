#pragma once

#include <cstdint>
#include <vector>

#include "hwgnn/graph.hpp"

namespace hwgnn {

/// Two-class contextual stochastic block model: structure calibrated to a
/// target homophily, features carrying +/- mu signal along a random unit
/// direction, stratified 60/20/20 masks.
struct SBMSpec {
  int n = 2000;
  double bot_fraction = 0.3;   // class-1 share, rho
  double homophily = 0.5;      // target h*
  double mean_degree = 10.0;
  int feature_dim = 16;
  double mu = 1.0;             // feature signal-to-noise
  std::uint64_t seed = 1;

  void validate() const;

  /// Intra/inter-class edge probabilities solved from (h*, mean degree, rho)
  /// with class-size correction. Throws DataError when degenerate.
  std::pair<double, double> edge_probabilities() const;
};

Graph generate_sbm(const SBMSpec& spec);

struct PremisePoint {
  double h_target = 0.0;
  double h_measured = 0.0;
  double high_freq_share = 0.0;  // energy share at lambda > 1 of the centered label signal
};

/// Premise verification: sweep target homophily, measure where the
/// spectral energy of the centered label indicator sits.
std::vector<PremisePoint> premise_check(const std::vector<double>& h_values, SBMSpec tmpl);

}  // namespace hwgnn
