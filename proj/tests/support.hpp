#pragma once

#include "qrank/text.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace support {

inline std::vector<bool> random_bits(std::uint64_t seed, std::uint64_t n, double p_one = 0.5) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution d(p_one);
  std::vector<bool> out(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    out[i] = d(rng);
  }
  return out;
}

inline std::vector<std::uint8_t> random_symbols(std::uint64_t seed, std::uint64_t n) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> out(n);
  for (auto& s : out) {
    s = static_cast<std::uint8_t>(rng() & 3);
  }
  return out;
}

/// Symbols drawn with the given weights, to exercise skewed counts.
inline std::vector<std::uint8_t> skewed_symbols(std::uint64_t seed, std::uint64_t n, std::vector<double> weights) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> d(weights.begin(), weights.end());
  std::vector<std::uint8_t> out(n);
  for (auto& s : out) {
    s = static_cast<std::uint8_t>(d(rng));
  }
  return out;
}

/// Text lengths that hit tail-block edge cases for the given block sizes.
inline std::vector<std::uint64_t> awkward_lengths(std::vector<std::uint64_t> const& block_sizes) {
  std::vector<std::uint64_t> out{0, 1, 2, 63, 64, 65, 255, 256, 257};
  for (auto b : block_sizes) {
    for (std::uint64_t k : {1u, 2u, 3u, 7u}) {
      for (std::int64_t d : {-1, 0, 1}) {
        out.push_back(static_cast<std::uint64_t>(static_cast<std::int64_t>(k * b) + d));
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// {0, 1, n-1, n}, every multiple of each step within [0, n] plus and minus
/// one, and `random` uniform positions.
inline std::vector<std::uint64_t> query_set(std::uint64_t n, std::vector<std::uint64_t> const& steps,
                                            std::uint64_t random, std::uint64_t seed) {
  std::vector<std::uint64_t> out{0, n};
  if (n >= 1) {
    out.push_back(1);
    out.push_back(n - 1);
  }
  for (auto step : steps) {
    for (std::uint64_t m = step; m <= n + 1; m += step) {
      for (std::uint64_t q : {m - 1, m, m + 1}) {
        if (q <= n) {
          out.push_back(q);
        }
      }
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> d(0, n);
  for (std::uint64_t i = 0; i < random; ++i) {
    out.push_back(d(rng));
  }
  return out;
}

} // namespace support
