#include "hwgnn/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hwgnn {

namespace {

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream is(path, mode);
  if (!is) throw DataError("cannot open file: " + path);
  return is;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os) throw DataError("cannot write file: " + path);
  return os;
}

bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::vector<std::pair<int, int>> read_edge_list(const std::string& path) {
  auto is = open_in(path);
  std::vector<std::pair<int, int>> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    int u, v;
    char sep;
    std::istringstream ss(line);
    if (!(ss >> u >> sep >> v) || sep != ',')
      throw DataError(path + ":" + std::to_string(lineno) + ": expected `u,v`");
    edges.emplace_back(u, v);
  }
  return edges;
}

void write_edge_list(const std::string& path, const std::vector<std::pair<int, int>>& edges) {
  auto os = open_out(path);
  os << "# edge list: u,v per line, 0-based node ids\n";
  for (auto [u, v] : edges) os << u << ',' << v << '\n';
  if (!os) throw DataError("write failed: " + path);
}

Mat read_features_text(const std::string& path) {
  auto is = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  size_t width = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    std::vector<double> row;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(lineno) + ": bad number `" + cell + "`");
      }
    }
    if (row.empty()) throw DataError(path + ":" + std::to_string(lineno) + ": empty row");
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw DataError(path + ":" + std::to_string(lineno) + ": ragged feature row");
    rows.push_back(std::move(row));
  }
  Mat m(static_cast<int>(rows.size()), static_cast<int>(width));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < width; ++j) m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  return m;
}

void write_features_text(const std::string& path, const Mat& features) {
  auto os = open_out(path);
  char buf[64];
  for (int i = 0; i < features.rows(); ++i) {
    for (int j = 0; j < features.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", features(i, j));
      os << (j ? "," : "") << buf;
    }
    os << '\n';
  }
  if (!os) throw DataError("write failed: " + path);
}

Mat read_features_binary(const std::string& path) {
  auto is = open_in(path, std::ios::binary);
  std::uint32_t n = 0, d = 0;
  is.read(reinterpret_cast<char*>(&n), 4);
  is.read(reinterpret_cast<char*>(&d), 4);
  if (!is) throw DataError("bad feature header: " + path);
  std::vector<float> data(static_cast<size_t>(n) * d);
  is.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(sizeof(float) * data.size()));
  if (!is) throw DataError("truncated feature file: " + path);
  Mat m(static_cast<int>(n), static_cast<int>(d));
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < d; ++j)
      m(static_cast<int>(i), static_cast<int>(j)) = data[static_cast<size_t>(i) * d + j];
  return m;
}

void write_features_binary(const std::string& path, const Mat& features) {
  auto os = open_out(path, std::ios::binary);
  std::uint32_t n = static_cast<std::uint32_t>(features.rows());
  std::uint32_t d = static_cast<std::uint32_t>(features.cols());
  os.write(reinterpret_cast<const char*>(&n), 4);
  os.write(reinterpret_cast<const char*>(&d), 4);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < d; ++j) {
      float v = static_cast<float>(features(static_cast<int>(i), static_cast<int>(j)));
      os.write(reinterpret_cast<const char*>(&v), 4);
    }
  if (!os) throw DataError("write failed: " + path);
}

Mat read_features(const std::string& path) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".bin" || ext == ".f32") return read_features_binary(path);
  return read_features_text(path);
}

LabelTable read_labels(const std::string& path, int n) {
  auto is = open_in(path);
  LabelTable t;
  t.labels.assign(static_cast<size_t>(n), kUnlabeled);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    std::istringstream ss(line);
    std::string id_s, label_s, split_s;
    if (!std::getline(ss, id_s, ',') || !std::getline(ss, label_s, ',') ||
        !std::getline(ss, split_s))
      throw DataError(path + ":" + std::to_string(lineno) + ": expected `node_id,label,split`");
    int id;
    int label;
    try {
      id = std::stoi(id_s);
      label = std::stoi(label_s);
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(lineno) + ": bad number");
    }
    if (id < 0 || id >= n)
      throw DataError(path + ":" + std::to_string(lineno) + ": node id out of range");
    if (label != 0 && label != 1)
      throw DataError(path + ":" + std::to_string(lineno) + ": label must be 0 or 1");
    t.labels[static_cast<size_t>(id)] = static_cast<std::int8_t>(label);
    if (split_s == "train")
      t.train_mask.push_back(id);
    else if (split_s == "val")
      t.val_mask.push_back(id);
    else if (split_s == "test")
      t.test_mask.push_back(id);
    else if (split_s != "none")
      throw DataError(path + ":" + std::to_string(lineno) + ": split must be train/val/test/none");
  }
  return t;
}

void write_labels(const std::string& path, const Graph& g) {
  auto os = open_out(path);
  os << "# node_id,label,split\n";
  auto split_of = [&](int v) -> const char* {
    if (std::binary_search(g.train_mask.begin(), g.train_mask.end(), v)) return "train";
    if (std::binary_search(g.val_mask.begin(), g.val_mask.end(), v)) return "val";
    if (std::binary_search(g.test_mask.begin(), g.test_mask.end(), v)) return "test";
    return "none";
  };
  for (int v = 0; v < g.n; ++v) {
    if (!g.is_labeled(v)) continue;
    os << v << ',' << static_cast<int>(g.labels[static_cast<size_t>(v)]) << ',' << split_of(v)
       << '\n';
  }
  if (!os) throw DataError("write failed: " + path);
}

Graph load_graph(const std::string& edges_path, const std::string& features_path,
                 const std::string& labels_path) {
  auto edges = read_edge_list(edges_path);
  Mat features = read_features(features_path);
  int n = static_cast<int>(features.rows());
  LabelTable t = read_labels(labels_path, n);
  return Graph::build(n, std::move(edges), std::move(features), std::move(t.labels),
                      std::move(t.train_mask), std::move(t.val_mask), std::move(t.test_mask));
}

void save_graph(const std::string& prefix, const Graph& g, bool text_features) {
  write_edge_list(prefix + ".edges.txt", g.edges);
  if (text_features)
    write_features_text(prefix + ".features.csv", g.features);
  else
    write_features_binary(prefix + ".features.bin", g.features);
  write_labels(prefix + ".labels.txt", g);
}

}  // namespace hwgnn
