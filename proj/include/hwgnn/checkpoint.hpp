#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hwgnn/model.hpp"
#include "hwgnn/types.hpp"

namespace hwgnn {

/// Versioned binary parameter table: name -> shape -> f64 payload.
/// Layout: magic "HWGN", u32 version, u32 entry count, then per entry
/// u32 name length, name bytes, u32 rows, u32 cols, row-major f64 data.
void save_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, Mat>>& params);

std::vector<std::pair<std::string, Mat>> load_checkpoint(const std::string& path);

template <class S>
std::vector<std::pair<std::string, Mat>> export_params(const ParamStore<S>& store) {
  std::vector<std::pair<std::string, Mat>> out;
  out.reserve(store.items.size());
  for (const auto& e : store.items) out.emplace_back(e.name, e.value.template cast<double>());
  return out;
}

template <class S>
void import_params(ParamStore<S>& store, const std::vector<std::pair<std::string, Mat>>& params) {
  for (const auto& [name, value] : params) {
    if (!store.has(name)) throw DataError("checkpoint parameter not in model: " + name);
    MatT<S>& dst = store.at(name);
    if (dst.rows() != value.rows() || dst.cols() != value.cols())
      throw DataError("checkpoint shape mismatch for " + name);
    dst = value.template cast<S>();
  }
}

}  // namespace hwgnn
