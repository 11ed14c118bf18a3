#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hwgnn {

// splitmix64; used to fan a master seed out into independent streams so that
// adding a component or sweep point never perturbs the others.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// Derive a child seed from (master, tag, index).
inline std::uint64_t split_seed(std::uint64_t master, std::string_view tag,
                                std::uint64_t index = 0) {
  return splitmix64(master ^ splitmix64(hash_tag(tag) + 0x9e3779b97f4a7c15ULL * index));
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::string_view tag,
                                std::uint64_t index = 0) {
  return std::mt19937_64(split_seed(master, tag, index));
}

}  // namespace hwgnn
