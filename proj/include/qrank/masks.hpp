#pragma once

#include "qrank/bits.hpp"

#include <array>
#include <bit>
#include <cstdint>

// Precomputed masks that select the bits to popcount for a given in-line
// position, so queries never shift or loop over words.
namespace qrank {

/// Bits [0, 16) of a binary block hold the delta.
inline constexpr unsigned kBiDeltaBits = 16;
/// Characters [0, 32) of a quad block hold the four deltas.
inline constexpr unsigned kQuadDeltaChars = 32;

template <std::size_t Words>
struct WideMask {
  std::array<std::uint64_t, Words> words{};

  constexpr void set(unsigned lo, unsigned hi) noexcept {
    for (unsigned w = 0; w < Words; ++w) {
      unsigned const a = std::max(lo, 64 * w);
      unsigned const b = std::min(hi, 64 * w + 64);
      if (a < b) {
        words[w] |= bit_range(a - 64 * w, b - 64 * w);
      }
    }
  }

  [[nodiscard]] constexpr unsigned count() const noexcept {
    unsigned c = 0;
    for (auto w : words) {
      c += static_cast<unsigned>(std::popcount(w));
    }
    return c;
  }
};

using HalfMask = WideMask<4>;    // 256 bits, one half of a line
using QuarterMask = WideMask<2>; // 128 bits

using BiMaskTable = std::array<HalfMask, 512>;
using QuarterMaskTable = std::array<QuarterMask, 512>;
using QuadMaskTable = std::array<QuarterMask, 256>;
using GroupMaskTable = std::array<std::uint64_t, 128>;

/// Entry p < 256: bits p..255 of the first half (suffix up to the middle).
/// Entry p >= 256: bits 0..p-257 of the second half (prefix from the middle).
/// Entries below the delta region are zero.
constexpr BiMaskTable make_bi_mask_table() {
  BiMaskTable t{};
  for (unsigned p = kBiDeltaBits; p < 512; ++p) {
    if (p < 256) {
      t[p].set(p, 256);
    } else {
      t[p].set(0, p - 256);
    }
  }
  return t;
}

/// Same scheme at quarter-line granularity for the two-anchor layouts:
/// even quarters count a suffix, odd quarters a prefix.
constexpr QuarterMaskTable make_quarter_mask_table() {
  QuarterMaskTable t{};
  for (unsigned p = 2 * kBiDeltaBits; p < 512; ++p) {
    unsigned const r = p % 128;
    if ((p / 128) % 2 == 0) {
      t[p].set(r, 128);
    } else {
      t[p].set(0, r);
    }
  }
  return t;
}

/// Indexed by character slot 0..255 of a quad line; each mask spans the 128
/// characters of one half (two plane-word pairs).
constexpr QuadMaskTable make_quad_mask_table() {
  QuadMaskTable t{};
  for (unsigned p = kQuadDeltaChars; p < 256; ++p) {
    if (p < 128) {
      t[p].set(p, 128);
    } else {
      t[p].set(0, p - 128);
    }
  }
  return t;
}

/// 64-character groups: entry r < 64 is the suffix r..63, entry 64 + r the
/// prefix 0..r-1.
constexpr GroupMaskTable make_group_mask_table() {
  GroupMaskTable t{};
  for (unsigned r = 0; r < 64; ++r) {
    t[r] = bit_range(r, 64);
    t[64 + r] = bit_range(0, r);
  }
  return t;
}

inline constexpr BiMaskTable kBiMasks = make_bi_mask_table();
inline constexpr QuarterMaskTable kQuarterMasks = make_quarter_mask_table();
inline constexpr QuadMaskTable kQuadMasks = make_quad_mask_table();
inline constexpr GroupMaskTable kGroupMasks = make_group_mask_table();

struct SignedCount {
  std::uint64_t count = 0;
  int sign = 1;

  friend bool operator==(SignedCount const&, SignedCount const&) = default;
};

/// Popcount of the half-line selected by line position p (16 <= p < 512).
/// Below the middle this is the suffix [p, 256) with sign -1, otherwise the
/// prefix [256, p) with sign +1.
inline SignedCount masked_half_popcount_bi(CacheLine const& block, unsigned p) noexcept {
  QRANK_ASSERT(p >= kBiDeltaBits && p < 512);
  unsigned const half = p >> 8;
  auto const& m = kBiMasks[p].words;
  std::uint64_t const* w = &block.words[4 * half];
  std::uint64_t const c = static_cast<std::uint64_t>(std::popcount(w[0] & m[0])) +
                          static_cast<std::uint64_t>(std::popcount(w[1] & m[1])) +
                          static_cast<std::uint64_t>(std::popcount(w[2] & m[2])) +
                          static_cast<std::uint64_t>(std::popcount(w[3] & m[3]));
  return {c, half == 0 ? -1 : 1};
}

} // namespace qrank
