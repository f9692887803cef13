#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "watched/model.hpp"

namespace watched {

// Independent generator for a named consumer of the run seed. Two substreams
// with different names never share state.
inline std::mt19937_64 substream(std::uint64_t seed, std::string_view name) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

inline Vec3 random_unit(std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    Vec3 v(normal(gen), normal(gen), normal(gen));
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

}  // namespace watched
