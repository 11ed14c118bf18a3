#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hwgnn/errors.hpp"
#include "hwgnn/types.hpp"

namespace hwgnn {

constexpr std::int8_t kUnlabeled = -1;

enum class Split : std::uint8_t { none = 0, train, val, test };

/// Sparse undirected attributed graph with optional binary labels and
/// disjoint train/val/test masks over labeled nodes.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // canonical u < v, sorted, deduplicated
  Mat features;                            // n x d0
  std::vector<std::int8_t> labels;         // -1 unlabeled, else {0,1}
  std::vector<int> train_mask, val_mask, test_mask;  // sorted node ids

  int feature_dim() const { return static_cast<int>(features.cols()); }
  bool is_labeled(int v) const { return labels[static_cast<size_t>(v)] != kUnlabeled; }

  /// Validates invariants (bounds, no self-loops, masks labeled+disjoint,
  /// feature row count) and canonicalizes the edge list. Throws DataError.
  static Graph build(int n, std::vector<std::pair<int, int>> edges, Mat features,
                     std::vector<std::int8_t> labels = {},
                     std::vector<int> train_mask = {}, std::vector<int> val_mask = {},
                     std::vector<int> test_mask = {});
};

/// Counts sparse matrix products so tests can assert the shared-basis economy.
struct SpmmCounter {
  static std::atomic<long>& counter();
  static void reset() { counter() = 0; }
  static long value() { return counter().load(); }
};

/// Symmetric normalized Laplacian L = I - D^{-1/2} A D^{-1/2} in CSR form with
/// sorted column indices. Isolated nodes get L_ii = 1 and no off-diagonals,
/// keeping the spectrum inside [0, 2].
struct Laplacian {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> vals;
  Vec degree;

  long nnz() const { return static_cast<long>(vals.size()); }

  /// L * X. Row-parallel when HWGNN_THREADS > 1; accumulation order within a
  /// row is fixed, so the result is identical for any thread count.
  template <class S>
  MatT<S> spmm(const MatT<S>& X) const;

  Mat dense() const;
};

Laplacian build_laplacian(const Graph& g);

/// Eq-2 style graph-level homophily ratio over edges whose both endpoints are
/// labeled; `restrict_to` (sorted node ids) limits counting to edges inside
/// that set, which is how train-mask homophily is computed during training.
/// Throws DataError when no edge qualifies.
double homophily_ratio(const Graph& g, const std::vector<int>* restrict_to = nullptr);

int spmm_thread_count();

}  // namespace hwgnn
