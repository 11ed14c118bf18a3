#include <doctest.h>

#include <cmath>

#include "hwgnn/spectral.hpp"
#include "hwgnn/synth.hpp"
#include "test_helpers.hpp"

using namespace hwgnn;

TEST_SUITE("synth") {

TEST_CASE("generated graphs satisfy the graph invariants") {
  SBMSpec spec;
  spec.n = 300;
  spec.homophily = 0.4;
  spec.seed = 5;
  Graph g = generate_sbm(spec);  // Graph::build already validates
  CHECK(g.n == 300);
  CHECK(g.features.rows() == 300);
  CHECK(!g.edges.empty());
  // 60/20/20 split over all nodes, every node labeled
  CHECK(g.train_mask.size() + g.val_mask.size() + g.test_mask.size() == 300);
  for (int v = 0; v < g.n; ++v) CHECK(g.is_labeled(v));
  // class balance near the requested fraction
  long bots = 0;
  for (auto y : g.labels) bots += y == 1;
  CHECK(std::abs(static_cast<double>(bots) / 300.0 - spec.bot_fraction) < 0.01);
}

TEST_CASE("measured homophily lands within 0.05 of the target for n=2000") {
  for (double target : {0.2, 0.9}) {
    std::vector<double> measured;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SBMSpec spec;
      spec.n = 2000;
      spec.homophily = target;
      spec.seed = seed;
      measured.push_back(homophily_ratio(generate_sbm(spec)));
    }
    CHECK(std::abs(hwtest::median(measured) - target) < 0.05);
    for (double m : measured) CHECK(std::abs(m - target) < 0.05);
  }
}

TEST_CASE("measured homophily is monotone in the target") {
  std::vector<double> medians;
  for (double target : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    std::vector<double> ms;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SBMSpec spec;
      spec.n = 800;
      spec.homophily = target;
      spec.seed = seed;
      ms.push_back(homophily_ratio(generate_sbm(spec)));
    }
    medians.push_back(hwtest::median(ms));
  }
  for (size_t i = 1; i < medians.size(); ++i) CHECK(medians[i] > medians[i - 1]);
}

TEST_CASE("edge count matches the calibrated mean degree") {
  // Collisions or decode bugs in the pair sampler would shrink the edge set
  // after deduplication; the realized count must track n * mean_degree / 2.
  for (double target : {0.15, 0.5, 0.85}) {
    SBMSpec spec;
    spec.n = 4000;
    spec.homophily = target;
    spec.mean_degree = 12.0;
    spec.seed = 77;
    Graph g = generate_sbm(spec);
    double expected = 0.5 * spec.mean_degree * spec.n;
    CHECK(std::abs(static_cast<double>(g.edges.size()) - expected) < 0.05 * expected);
  }
}

TEST_CASE("fixed seed reproduces the identical edge set") {
  SBMSpec spec;
  spec.n = 500;
  spec.seed = 42;
  Graph a = generate_sbm(spec);
  Graph b = generate_sbm(spec);
  REQUIRE(a.edges.size() == b.edges.size());
  CHECK(a.edges == b.edges);
  CHECK((a.features - b.features).norm() == 0.0);
  CHECK(a.train_mask == b.train_mask);
}

TEST_CASE("mu=0 features carry no class signal") {
  SBMSpec spec;
  spec.n = 3000;
  spec.mu = 0.0;
  spec.seed = 17;
  Graph g = generate_sbm(spec);
  Vec mean_bot = Vec::Zero(spec.feature_dim), mean_hum = Vec::Zero(spec.feature_dim);
  long nb = 0, nh = 0;
  for (int i = 0; i < g.n; ++i) {
    if (g.labels[static_cast<size_t>(i)] == 1) {
      mean_bot += g.features.row(i).transpose();
      ++nb;
    } else {
      mean_hum += g.features.row(i).transpose();
      ++nh;
    }
  }
  mean_bot /= static_cast<double>(nb);
  mean_hum /= static_cast<double>(nh);
  // class means differ only by sampling noise ~ 1/sqrt(n)
  CHECK((mean_bot - mean_hum).norm() < 5.0 / std::sqrt(static_cast<double>(g.n)) * 4);
}

TEST_CASE("degenerate parameters are rejected") {
  SBMSpec spec;
  spec.n = 100;
  spec.mean_degree = 99.0;  // forces p out of range
  spec.homophily = 0.99;    // outside the validated open interval is fine, but
  CHECK_THROWS_AS(generate_sbm(spec), DataError);
  SBMSpec bad;
  bad.bot_fraction = 0.0;
  CHECK_THROWS_AS(generate_sbm(bad), DataError);
  SBMSpec tiny;
  tiny.n = 100;
  tiny.bot_fraction = 0.005;  // rounds to zero bots
  CHECK_THROWS_AS(generate_sbm(tiny), DataError);
}

TEST_CASE("high-homophily graph concentrates label energy below lambda 1") {
  SBMSpec spec;
  spec.n = 400;
  spec.homophily = 0.9;
  spec.mean_degree = 12.0;
  spec.seed = 23;
  Graph g = generate_sbm(spec);
  Laplacian lap = build_laplacian(g);
  Vec signal(g.n);
  for (int i = 0; i < g.n; ++i) signal[i] = g.labels[static_cast<size_t>(i)] == 1 ? 1.0 : -1.0;
  signal.array() -= signal.mean();
  auto profile = spectral_energy_profile(lap, signal);
  CHECK(1.0 - high_frequency_share(profile, 1.0) > 0.6);
}

TEST_CASE("premise sweep: heterophily pushes energy into high frequencies") {
  SBMSpec tmpl;
  tmpl.n = 300;
  tmpl.mean_degree = 10.0;
  tmpl.seed = 31;
  auto points = premise_check({0.1, 0.5, 0.9}, tmpl);
  REQUIRE(points.size() == 3);  // one row per requested h
  CHECK(points[0].high_freq_share > points[2].high_freq_share);
  CHECK(points[0].h_target == 0.1);
  CHECK(points[2].h_target == 0.9);
}

}  // TEST_SUITE
