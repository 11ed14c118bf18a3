#pragma once

#include <string>

#include "hwgnn/graph.hpp"

namespace hwgnn {

/// Edge list: one `u,v` pair per line, 0-based ids, `#` comment lines skipped.
std::vector<std::pair<int, int>> read_edge_list(const std::string& path);
void write_edge_list(const std::string& path, const std::vector<std::pair<int, int>>& edges);

/// Features, text form: one row per node, comma-separated decimals.
Mat read_features_text(const std::string& path);
void write_features_text(const std::string& path, const Mat& features);

/// Features, binary form: 8-byte header (u32 n, u32 d0, little endian),
/// then n*d0 little-endian f32 values, row major.
Mat read_features_binary(const std::string& path);
void write_features_binary(const std::string& path, const Mat& features);

/// Picks text/binary by extension (.bin / .f32 binary, anything else text).
Mat read_features(const std::string& path);

struct LabelTable {
  std::vector<std::int8_t> labels;
  std::vector<int> train_mask, val_mask, test_mask;
};

/// Labels and split file: `node_id,label,split`, split in {train,val,test,none}.
LabelTable read_labels(const std::string& path, int n);
void write_labels(const std::string& path, const Graph& g);

/// Loads the three files into a validated Graph.
Graph load_graph(const std::string& edges_path, const std::string& features_path,
                 const std::string& labels_path);

/// Writes `<prefix>.edges.txt`, `<prefix>.features.bin` (or .csv when
/// text_features), `<prefix>.labels.txt`.
void save_graph(const std::string& prefix, const Graph& g, bool text_features = false);

}  // namespace hwgnn
