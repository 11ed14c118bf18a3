#include "hwgnn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <unordered_set>

namespace hwgnn {

namespace {

void check_mask(const Graph& g, const std::vector<int>& mask, const char* name) {
  for (int v : mask) {
    if (v < 0 || v >= g.n) throw DataError(std::string(name) + " mask node out of range");
    if (!g.is_labeled(v)) throw DataError(std::string(name) + " mask contains unlabeled node");
  }
}

}  // namespace

Graph Graph::build(int n, std::vector<std::pair<int, int>> edges, Mat features,
                   std::vector<std::int8_t> labels, std::vector<int> train_mask,
                   std::vector<int> val_mask, std::vector<int> test_mask) {
  if (n < 0) throw DataError("negative node count");
  Graph g;
  g.n = n;
  for (auto& [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n) throw DataError("edge endpoint out of range");
    if (u == v) throw DataError("self-loop rejected");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.edges = std::move(edges);

  if (features.size() > 0 && features.rows() != n)
    throw DataError("feature row count does not match node count");
  g.features = std::move(features);

  if (labels.empty()) labels.assign(static_cast<size_t>(n), kUnlabeled);
  if (static_cast<int>(labels.size()) != n) throw DataError("label count does not match node count");
  for (auto y : labels)
    if (y != kUnlabeled && y != 0 && y != 1) throw DataError("label outside {0,1,unlabeled}");
  g.labels = std::move(labels);

  auto canon = [](std::vector<int>& m) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
  };
  canon(train_mask);
  canon(val_mask);
  canon(test_mask);
  g.train_mask = std::move(train_mask);
  g.val_mask = std::move(val_mask);
  g.test_mask = std::move(test_mask);
  check_mask(g, g.train_mask, "train");
  check_mask(g, g.val_mask, "val");
  check_mask(g, g.test_mask, "test");

  std::unordered_set<int> seen;
  for (const auto* m : {&g.train_mask, &g.val_mask, &g.test_mask})
    for (int v : *m)
      if (!seen.insert(v).second) throw DataError("masks are not pairwise disjoint");

  return g;
}

std::atomic<long>& SpmmCounter::counter() {
  static std::atomic<long> c{0};
  return c;
}

int spmm_thread_count() {
  static int cached = [] {
    const char* env = std::getenv("HWGNN_THREADS");
    if (!env) return 1;
    int t = std::atoi(env);
    return t > 1 ? t : 1;
  }();
  return cached;
}

Laplacian build_laplacian(const Graph& g) {
  Laplacian lap;
  lap.n = g.n;
  lap.degree = Vec::Zero(g.n);
  for (auto [u, v] : g.edges) {
    lap.degree[u] += 1.0;
    lap.degree[v] += 1.0;
  }

  // Adjacency in CSR, then L = I - D^{-1/2} A D^{-1/2} row by row.
  std::vector<std::vector<int>> adj(static_cast<size_t>(g.n));
  for (auto [u, v] : g.edges) {
    adj[static_cast<size_t>(u)].push_back(v);
    adj[static_cast<size_t>(v)].push_back(u);
  }
  lap.row_ptr.assign(static_cast<size_t>(g.n) + 1, 0);
  for (int i = 0; i < g.n; ++i) {
    std::sort(adj[static_cast<size_t>(i)].begin(), adj[static_cast<size_t>(i)].end());
    lap.row_ptr[static_cast<size_t>(i) + 1] =
        lap.row_ptr[static_cast<size_t>(i)] + static_cast<int>(adj[static_cast<size_t>(i)].size()) + 1;
  }
  lap.col_idx.resize(static_cast<size_t>(lap.row_ptr.back()));
  lap.vals.resize(static_cast<size_t>(lap.row_ptr.back()));
  for (int i = 0; i < g.n; ++i) {
    int p = lap.row_ptr[static_cast<size_t>(i)];
    bool diag_done = false;
    double di = lap.degree[i];
    for (int j : adj[static_cast<size_t>(i)]) {
      if (!diag_done && j > i) {
        lap.col_idx[static_cast<size_t>(p)] = i;
        lap.vals[static_cast<size_t>(p)] = 1.0;
        ++p;
        diag_done = true;
      }
      lap.col_idx[static_cast<size_t>(p)] = j;
      lap.vals[static_cast<size_t>(p)] = -1.0 / std::sqrt(di * lap.degree[j]);
      ++p;
    }
    if (!diag_done) {
      lap.col_idx[static_cast<size_t>(p)] = i;
      lap.vals[static_cast<size_t>(p)] = 1.0;  // isolated nodes included
      ++p;
    }
  }
  return lap;
}

template <class S>
MatT<S> Laplacian::spmm(const MatT<S>& X) const {
  if (X.rows() != n) throw std::invalid_argument("spmm: row count mismatch");
  SpmmCounter::counter()++;
  MatT<S> out = MatT<S>::Zero(X.rows(), X.cols());
  auto run_rows = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      auto row = out.row(i);
      for (int p = row_ptr[static_cast<size_t>(i)]; p < row_ptr[static_cast<size_t>(i) + 1]; ++p)
        row += static_cast<S>(vals[static_cast<size_t>(p)]) * X.row(col_idx[static_cast<size_t>(p)]);
    }
  };
  int threads = spmm_thread_count();
  if (threads <= 1 || n < 4 * threads) {
    run_rows(0, n);
  } else {
    std::vector<std::thread> pool;
    int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      int lo = t * chunk, hi = std::min(n, lo + chunk);
      if (lo < hi) pool.emplace_back(run_rows, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

template MatT<double> Laplacian::spmm<double>(const MatT<double>&) const;
template MatT<float> Laplacian::spmm<float>(const MatT<float>&) const;

Mat Laplacian::dense() const {
  Mat L = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int p = row_ptr[static_cast<size_t>(i)]; p < row_ptr[static_cast<size_t>(i) + 1]; ++p)
      L(i, col_idx[static_cast<size_t>(p)]) = vals[static_cast<size_t>(p)];
  return L;
}

double homophily_ratio(const Graph& g, const std::vector<int>* restrict_to) {
  auto in_set = [&](int v) {
    if (!restrict_to) return true;
    return std::binary_search(restrict_to->begin(), restrict_to->end(), v);
  };
  long counted = 0, same = 0;
  for (auto [u, v] : g.edges) {
    if (!g.is_labeled(u) || !g.is_labeled(v)) continue;
    if (!in_set(u) || !in_set(v)) continue;
    ++counted;
    if (g.labels[static_cast<size_t>(u)] == g.labels[static_cast<size_t>(v)]) ++same;
  }
  if (counted == 0) throw DataError("homophily ratio undefined: no edge with both endpoints labeled");
  return static_cast<double>(same) / static_cast<double>(counted);
}

}  // namespace hwgnn
