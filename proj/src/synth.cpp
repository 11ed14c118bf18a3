#include "hwgnn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hwgnn/rng.hpp"
#include "hwgnn/spectral.hpp"

namespace hwgnn {

void SBMSpec::validate() const {
  if (n < 4) throw DataError("sbm: need at least 4 nodes");
  if (!(bot_fraction > 0.0 && bot_fraction < 1.0)) throw DataError("sbm: bot fraction outside (0,1)");
  if (!(homophily > 0.0 && homophily < 1.0)) throw DataError("sbm: target homophily outside (0,1)");
  if (mean_degree <= 0.0) throw DataError("sbm: mean degree must be positive");
  if (feature_dim < 1) throw DataError("sbm: feature dim must be >= 1");
  if (mu < 0.0) throw DataError("sbm: mu must be non-negative");
}

std::pair<double, double> SBMSpec::edge_probabilities() const {
  validate();
  long nb = std::lround(bot_fraction * n);
  long nh = n - nb;
  if (nb < 2 || nh < 2) throw DataError("sbm: class too small for intra-class edges");
  double intra_pairs = 0.5 * (static_cast<double>(nb) * (nb - 1) + static_cast<double>(nh) * (nh - 1));
  double cross_pairs = static_cast<double>(nb) * static_cast<double>(nh);
  double total_edges = 0.5 * mean_degree * n;
  double p_in = homophily * total_edges / intra_pairs;
  double p_out = (1.0 - homophily) * total_edges / cross_pairs;
  if (!(p_in > 0.0 && p_in < 1.0 && p_out > 0.0 && p_out < 1.0))
    throw DataError("sbm: degenerate edge probabilities (p_in=" + std::to_string(p_in) +
                    ", p_out=" + std::to_string(p_out) + ")");
  return {p_in, p_out};
}

namespace {

// Bernoulli process over a linear index space via geometric gaps; visits each
// index independently with probability p in O(expected hits) time.
template <class Visit>
void bernoulli_scan(long long space, double p, std::mt19937_64& rng, Visit&& visit) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double log1mp = std::log1p(-p);
  long long idx = -1;
  while (true) {
    double u = std::max(unif(rng), 1e-300);
    idx += 1 + static_cast<long long>(std::floor(std::log(u) / log1mp));
    if (idx >= space) break;
    visit(idx);
  }
}

// Decode a triangular pair index over m nodes: row-major (i, j), i < j.
std::pair<long, long> decode_pair(long long idx, long m) {
  // i is the largest row whose block start <= idx; solve quadratic then fix up.
  double mf = static_cast<double>(m);
  double approx = mf - 0.5 - std::sqrt((mf - 0.5) * (mf - 0.5) - 2.0 * static_cast<double>(idx));
  long i = static_cast<long>(std::max(0.0, std::floor(approx)));
  auto block_start = [m](long r) { return r * (2 * m - r - 1) / 2; };
  while (i > 0 && block_start(i) > idx) --i;
  while (i + 1 < m && block_start(i + 1) <= idx) ++i;
  long j = i + 1 + static_cast<long>(idx - block_start(i));
  return {i, j};
}

}  // namespace

Graph generate_sbm(const SBMSpec& spec) {
  auto [p_in, p_out] = spec.edge_probabilities();
  long nb = std::lround(spec.bot_fraction * spec.n);
  long nh = spec.n - nb;

  // Random class assignment via a seeded permutation: perm[0..nb) are bots.
  std::vector<int> perm(static_cast<size_t>(spec.n));
  std::iota(perm.begin(), perm.end(), 0);
  {
    auto rng = make_rng(spec.seed, "sbm.assign");
    std::shuffle(perm.begin(), perm.end(), rng);
  }
  std::vector<std::int8_t> labels(static_cast<size_t>(spec.n), 0);
  for (long i = 0; i < nb; ++i) labels[static_cast<size_t>(perm[static_cast<size_t>(i)])] = 1;

  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<size_t>(0.6 * spec.mean_degree * spec.n));
  auto edge_rng = make_rng(spec.seed, "sbm.edges");
  auto add_intra = [&](long offset, long m) {
    bernoulli_scan(static_cast<long long>(m) * (m - 1) / 2, p_in, edge_rng, [&](long long idx) {
      auto [i, j] = decode_pair(idx, m);
      edges.emplace_back(perm[static_cast<size_t>(offset + i)], perm[static_cast<size_t>(offset + j)]);
    });
  };
  add_intra(0, nb);
  add_intra(nb, nh);
  bernoulli_scan(static_cast<long long>(nb) * nh, p_out, edge_rng, [&](long long idx) {
    long bi = static_cast<long>(idx / nh);
    long hj = static_cast<long>(idx % nh);
    edges.emplace_back(perm[static_cast<size_t>(bi)], perm[static_cast<size_t>(nb + hj)]);
  });

  // Class-dependent means +/- mu along a random unit direction, unit noise.
  auto feat_rng = make_rng(spec.seed, "sbm.features");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec direction(spec.feature_dim);
  for (int j = 0; j < spec.feature_dim; ++j) direction[j] = normal(feat_rng);
  direction.normalize();
  Mat features(spec.n, spec.feature_dim);
  for (int i = 0; i < spec.n; ++i) {
    double sign = labels[static_cast<size_t>(i)] == 1 ? 1.0 : -1.0;
    for (int j = 0; j < spec.feature_dim; ++j)
      features(i, j) = sign * spec.mu * direction[j] + normal(feat_rng);
  }

  // Stratified 60/20/20 masks.
  std::vector<int> by_class[2];
  for (int i = 0; i < spec.n; ++i) by_class[labels[static_cast<size_t>(i)]].push_back(i);
  std::vector<int> train, val, test;
  auto mask_rng = make_rng(spec.seed, "sbm.masks");
  for (auto& nodes : by_class) {
    std::shuffle(nodes.begin(), nodes.end(), mask_rng);
    size_t n_train = static_cast<size_t>(0.6 * static_cast<double>(nodes.size()));
    size_t n_val = static_cast<size_t>(0.2 * static_cast<double>(nodes.size()));
    for (size_t i = 0; i < nodes.size(); ++i) {
      if (i < n_train)
        train.push_back(nodes[i]);
      else if (i < n_train + n_val)
        val.push_back(nodes[i]);
      else
        test.push_back(nodes[i]);
    }
  }

  return Graph::build(spec.n, std::move(edges), std::move(features), std::move(labels),
                      std::move(train), std::move(val), std::move(test));
}

std::vector<PremisePoint> premise_check(const std::vector<double>& h_values, SBMSpec tmpl) {
  std::vector<PremisePoint> out;
  out.reserve(h_values.size());
  for (double h : h_values) {
    SBMSpec spec = tmpl;
    spec.homophily = h;
    Graph g = generate_sbm(spec);
    Laplacian lap = build_laplacian(g);

    Vec signal(g.n);
    for (int i = 0; i < g.n; ++i) signal[i] = g.labels[static_cast<size_t>(i)] == 1 ? 1.0 : -1.0;
    signal.array() -= signal.mean();

    auto profile = spectral_energy_profile(lap, signal);
    PremisePoint pt;
    pt.h_target = h;
    pt.h_measured = homophily_ratio(g);
    pt.high_freq_share = high_frequency_share(profile, 1.0);
    out.push_back(pt);
  }
  return out;
}

}  // namespace hwgnn
