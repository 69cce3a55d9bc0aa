#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace textmine::detail {

// std::uniform_*_distribution output is not pinned by the standard, so all
// randomized code paths draw through these helpers instead. mt19937 itself
// is fully specified, which keeps results reproducible across toolchains.

using Rng = std::mt19937;

inline Rng make_rng(std::uint32_t seed) { return Rng{seed}; }

inline std::size_t next_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng()) % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double next_double(Rng& rng) {
  std::uint64_t hi = rng();
  std::uint64_t lo = rng();
  return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
}

/// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = next_index(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

inline std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  shuffle(idx, rng);
  return idx;
}

}  // namespace textmine::detail
