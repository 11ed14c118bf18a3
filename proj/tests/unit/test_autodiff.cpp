#include <doctest.h>

#include <cmath>
#include <functional>

#include "hwgnn/autodiff.hpp"
#include "test_helpers.hpp"

using namespace hwgnn;
using ad::Tape;
using hwtest::random_graph;
using hwtest::random_matrix;

namespace {

// Rebuilds the graph per evaluation and compares analytic gradients of a
// scalar output against central finite differences.
void check_gradients(std::vector<Mat> params,
                     const std::function<int(Tape<double>&, const std::vector<int>&)>& build,
                     double tol = 1e-6, double eps = 1e-6) {
  auto eval = [&](const std::vector<Mat>& p) {
    Tape<double> tape(false);
    std::vector<int> ids;
    for (const auto& m : p) ids.push_back(tape.leaf(m));
    int loss = build(tape, ids);
    return tape.scalar(loss);
  };

  Tape<double> tape(true);
  std::vector<int> ids;
  for (const auto& m : params) ids.push_back(tape.leaf(m));
  int loss = build(tape, ids);
  tape.backward(loss);

  for (size_t p = 0; p < params.size(); ++p) {
    Mat analytic = tape.grad(ids[p]);
    if (analytic.size() == 0) analytic = Mat::Zero(params[p].rows(), params[p].cols());
    for (int i = 0; i < params[p].rows(); ++i)
      for (int j = 0; j < params[p].cols(); ++j) {
        std::vector<Mat> plus = params, minus = params;
        plus[p](i, j) += eps;
        minus[p](i, j) -= eps;
        double fd = (eval(plus) - eval(minus)) / (2 * eps);
        double denom = std::max({std::abs(fd), std::abs(analytic(i, j)), 1e-4});
        CHECK(std::abs(fd - analytic(i, j)) / denom < tol);
      }
  }
}

}  // namespace

TEST_SUITE("autodiff") {

TEST_CASE("matmul chain") {
  check_gradients({random_matrix(3, 4, 1), random_matrix(4, 2, 2)},
                  [](Tape<double>& t, const std::vector<int>& p) {
                    return t.sum(t.matmul(p[0], p[1]));
                  });
}

TEST_CASE("bias broadcast, tanh, cmul") {
  check_gradients({random_matrix(4, 3, 3), random_matrix(1, 3, 4), random_matrix(4, 3, 5)},
                  [](Tape<double>& t, const std::vector<int>& p) {
                    int a = t.tanh_(t.add_rowvec(p[0], p[1]));
                    return t.sum(t.cmul(a, p[2]));
                  });
}

TEST_CASE("relu away from the kink") {
  Mat x = random_matrix(5, 4, 6);
  // keep pre-activations clear of zero so finite differences are clean
  for (int i = 0; i < x.size(); ++i)
    if (std::abs(x.data()[i]) < 0.05) x.data()[i] = 0.1;
  check_gradients({x}, [](Tape<double>& t, const std::vector<int>& p) {
    return t.sum(t.relu_(t.affine(p[0], 1.5, -0.2)));
  });
}

TEST_CASE("softmax outputs are positive and sum to one exactly") {
  Tape<double> t(false);
  int w = t.softmax_vec(t.leaf(random_matrix(7, 1, 70)));
  CHECK(t.val(w).minCoeff() > 0.0);
  CHECK(std::abs(t.val(w).sum() - 1.0) < 1e-12);
}

TEST_CASE("softmax + dot + pack") {
  check_gradients({random_matrix(5, 1, 7), random_matrix(5, 1, 8)},
                  [](Tape<double>& t, const std::vector<int>& p) {
                    int w = t.softmax_vec(p[0]);
                    return t.dot(w, p[1]);
                  });
  check_gradients({random_matrix(1, 1, 9), random_matrix(1, 1, 10), random_matrix(1, 1, 11)},
                  [](Tape<double>& t, const std::vector<int>& p) {
                    int v = t.pack_scalars({p[0], p[1], p[2]});
                    return t.dot(v, v);
                  });
}

TEST_CASE("sub, scale, sum compose") {
  check_gradients({random_matrix(3, 3, 12), random_matrix(3, 3, 13)},
                  [](Tape<double>& t, const std::vector<int>& p) {
                    int d = t.sub(p[0], p[1]);
                    return t.scale(t.sum(t.cmul(d, d)), 0.5);
                  });
}

TEST_CASE("focal loss gradient (alpha 0.25, gamma 2)") {
  std::vector<std::int8_t> labels{1, 0, 1, 0, 1, 0};
  std::vector<int> mask{0, 1, 2, 4, 5};
  check_gradients({random_matrix(6, 2, 14)},
                  [&](Tape<double>& t, const std::vector<int>& p) {
                    return t.focal_loss(p[0], labels, mask, 0.25, 2.0);
                  });
}

TEST_CASE("focal loss with gamma 0 and no weighting is cross-entropy") {
  Mat logits = random_matrix(4, 2, 15);
  std::vector<std::int8_t> labels{1, 0, 0, 1};
  std::vector<int> mask{0, 1, 2, 3};
  Tape<double> t(false);
  int id = t.leaf(logits);
  int loss = t.focal_loss(id, labels, mask, 1.0, 0.0);
  double expect = 0.0;
  for (int i : mask) {
    double m = std::max(logits(i, 0), logits(i, 1));
    double lse = m + std::log(std::exp(logits(i, 0) - m) + std::exp(logits(i, 1) - m));
    expect += -(logits(i, labels[static_cast<size_t>(i)]) - lse);
  }
  expect /= static_cast<double>(mask.size());
  CHECK(t.scalar(loss) == doctest::Approx(expect).epsilon(1e-12));
  check_gradients({logits}, [&](Tape<double>& tp, const std::vector<int>& p) {
    return tp.focal_loss(p[0], labels, mask, 1.0, 0.0);
  });
}

TEST_CASE("focal loss closed-form point: p=0.5, gamma 2") {
  Mat logits(1, 2);
  logits << 0.0, 0.0;  // both classes at 0.5
  std::vector<std::int8_t> labels{1};
  std::vector<int> mask{0};
  Tape<double> t(false);
  int loss = t.focal_loss(t.leaf(logits), labels, mask, 1.0, 2.0);
  CHECK(t.scalar(loss) == doctest::Approx(0.25 * std::log(2.0)).epsilon(1e-12));  // 0.173287
}

TEST_CASE("focal loss vanishes as the true-class probability approaches 1") {
  Mat logits(1, 2);
  logits << -20.0, 20.0;
  std::vector<std::int8_t> labels{1};
  Tape<double> t(false);
  int loss = t.focal_loss(t.leaf(logits), labels, {0}, 0.25, 2.0);
  CHECK(t.scalar(loss) < 1e-15);
  CHECK_THROWS_AS(t.focal_loss(t.leaf(logits), labels, {}, 0.25, 2.0), std::invalid_argument);
}

TEST_CASE("window coefficient node routes gradients to omega and sigma") {
  PolyBasis basis(BasisKind::bernstein, 4);
  BasisTable table(basis, Quadrature::default_scheme(), CoeffMode::overlap);
  Mat omega(1, 1), sigma(1, 1), mixer = random_matrix(5, 1, 16);
  omega << 0.9;
  sigma << 0.3;
  check_gradients({omega, sigma},
                  [&](Tape<double>& t, const std::vector<int>& p) {
                    int c = t.window_coeffs(p[0], p[1], table);
                    return t.dot(c, t.leaf(mixer));
                  });
}

TEST_CASE("windowed_conv gradients for every input") {
  Graph g = random_graph(9, 0.35, 17);
  Laplacian lap = build_laplacian(g);
  PolyBasis basis(BasisKind::bernstein, 3);
  const int d = 3, dp = 2, S = 2;
  Mat H = random_matrix(9, d, 18);
  Mat c0 = random_matrix(4, 1, 19), c1 = random_matrix(4, 1, 20);
  Mat logits = random_matrix(S, 1, 21);
  Mat W0 = random_matrix(d, dp, 22), W1 = random_matrix(d, dp, 23);
  Mat probe = random_matrix(9, dp, 24);
  check_gradients({H, c0, c1, logits, W0, W1},
                  [&](Tape<double>& t, const std::vector<int>& p) {
                    int w = t.softmax_vec(p[3]);
                    int conv = t.windowed_conv(p[0], {p[1], p[2]}, w, {p[4], p[5]}, lap, basis);
                    return t.dot(conv, t.leaf(probe));
                  },
                  2e-6);
}

TEST_CASE("windowed_conv uses K spmm per call") {
  Graph g = random_graph(12, 0.3, 25);
  Laplacian lap = build_laplacian(g);
  PolyBasis basis(BasisKind::beta, 4);
  Tape<double> t(false);
  int H = t.leaf(random_matrix(12, 3, 26));
  int c = t.leaf(Vec::Ones(5));
  int w = t.softmax_vec(t.leaf(Mat::Zero(1, 1)));
  int W = t.leaf(random_matrix(3, 3, 27));
  SpmmCounter::reset();
  t.windowed_conv(H, {c}, w, {W}, lap, basis);
  CHECK(SpmmCounter::value() == 4);
}

TEST_CASE("doubling the loss doubles every gradient") {
  Mat A = random_matrix(3, 3, 28), B = random_matrix(3, 3, 29);
  auto run = [&](double factor) {
    Tape<double> t(true);
    int a = t.leaf(A), b = t.leaf(B);
    int loss = t.scale(t.sum(t.cmul(t.matmul(a, b), t.tanh_(a))), factor);
    t.backward(loss);
    return std::pair{Mat(t.grad(a)), Mat(t.grad(b))};
  };
  auto [ga1, gb1] = run(1.0);
  auto [ga2, gb2] = run(2.0);
  CHECK((ga2 - 2.0 * ga1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((gb2 - 2.0 * gb1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("float tape runs the same graph") {
  Tape<float> t(true);
  MatT<float> A = random_matrix(3, 3, 30).cast<float>();
  int a = t.leaf(A);
  int loss = t.sum(t.tanh_(t.matmul(a, a)));
  t.backward(loss);
  CHECK(t.grad(a).allFinite());
}

}  // TEST_SUITE
