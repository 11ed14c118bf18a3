#pragma once

#include <cstdint>
#include <vector>

#include "hwgnn/types.hpp"

namespace hwgnn {

struct ClassStats {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double train_f1 = 0.0;
  double val_f1 = 0.0;
};

struct MetricsReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  ClassStats per_class[2];
  long confusion[2][2] = {{0, 0}, {0, 0}};  // [true][pred]
  std::vector<EpochStats> curve;
  double wall_clock_s = 0.0;
};

inline std::vector<int> argmax_rows(const Mat& probs) {
  std::vector<int> pred(static_cast<size_t>(probs.rows()));
  for (int i = 0; i < probs.rows(); ++i) pred[static_cast<size_t>(i)] = probs(i, 1) > probs(i, 0) ? 1 : 0;
  return pred;
}

/// Accuracy, confusion, per-class precision/recall/F1 and their unweighted
/// mean (Macro-F1) over `mask`. Empty denominators count as 0.
inline MetricsReport compute_metrics(const Mat& probs, const std::vector<std::int8_t>& labels,
                                     const std::vector<int>& mask) {
  MetricsReport r;
  std::vector<int> pred = argmax_rows(probs);
  long correct = 0;
  for (int i : mask) {
    int y = labels[static_cast<size_t>(i)];
    int p = pred[static_cast<size_t>(i)];
    r.confusion[y][p]++;
    if (y == p) ++correct;
  }
  long total = static_cast<long>(mask.size());
  r.accuracy = total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  for (int c = 0; c < 2; ++c) {
    long tp = r.confusion[c][c];
    long fp = r.confusion[1 - c][c];
    long fn = r.confusion[c][1 - c];
    double prec = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    double rec = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    double f1 = prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    r.per_class[c] = ClassStats{prec, rec, f1};
  }
  r.macro_f1 = 0.5 * (r.per_class[0].f1 + r.per_class[1].f1);
  return r;
}

/// Macro-F1 shorthand used by the early-stopping loop.
inline double macro_f1(const Mat& probs, const std::vector<std::int8_t>& labels,
                       const std::vector<int>& mask) {
  return compute_metrics(probs, labels, mask).macro_f1;
}

}  // namespace hwgnn
