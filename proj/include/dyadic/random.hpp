#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "dyadic/function.hpp"

namespace dyadic {

using Rng = std::mt19937_64;

/// splitmix64 finaliser; derives independent child seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  return mix_seed(mix_seed(mix_seed(master ^ mix_seed(a)) ^ b) ^ c);
}

inline std::uint64_t tag_seed(std::string_view tag) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char ch : tag) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ULL;
  return h;
}

/// i.i.d. standard normal samples.
DyadicFunction random_function(const Grid& grid, Rng& rng);
/// Random function whose Haar coefficients live only on levels >= `from_level`
/// (mean zero). Used to probe suprema concentrated at fine scales.
DyadicFunction random_band_function(const Grid& grid, int from_level, Rng& rng);

}  // namespace dyadic
