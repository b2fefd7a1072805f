#pragma once

#include <cstdint>
#include <random>

namespace mcfuse {

// Engine plus the two draws the library needs. std::uniform_*_distribution
// is implementation-defined, so these are spelled out to keep generated
// data identical across standard libraries.
using Rng = std::mt19937_64;

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on {0, ..., n - 1}; rejection sampling avoids modulo bias.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace mcfuse
