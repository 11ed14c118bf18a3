#include "hwgnn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "hwgnn/errors.hpp"

namespace hwgnn {

namespace {
constexpr char kMagic[4] = {'H', 'W', 'G', 'N'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
}  // namespace

void save_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, Mat>>& params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write checkpoint: " + path);
  os.write(kMagic, 4);
  write_u32(os, kVersion);
  write_u32(os, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, m] : params) {
    write_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(os, static_cast<std::uint32_t>(m.rows()));
    write_u32(os, static_cast<std::uint32_t>(m.cols()));
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(m.size())));
  }
  if (!os) throw DataError("checkpoint write failed: " + path);
}

std::vector<std::pair<std::string, Mat>> load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw DataError("bad checkpoint magic");
  std::uint32_t version = read_u32(is);
  if (version != kVersion) throw DataError("unsupported checkpoint version");
  std::uint32_t count = read_u32(is);
  std::vector<std::pair<std::string, Mat>> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t len = read_u32(is);
    std::string name(len, '\0');
    is.read(name.data(), len);
    std::uint32_t rows = read_u32(is), cols = read_u32(is);
    Mat m(rows, cols);
    is.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(m.size())));
    if (!is) throw DataError("truncated checkpoint: " + path);
    out.emplace_back(std::move(name), std::move(m));
  }
  return out;
}

}  // namespace hwgnn
