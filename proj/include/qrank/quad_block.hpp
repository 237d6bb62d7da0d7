#pragma once

#include "qrank/bits.hpp"
#include "qrank/masks.hpp"
#include "qrank/text.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <span>

// Transposed, negated encoding of DNA characters inside a cache line.
//
// A line holds 256 character slots as four (low-plane, high-plane) word
// pairs: slot s lives in bit s % 64 of words 2(s / 64) and 2(s / 64) + 1.
// Both planes store the bitwise NOT of the characters' bits, so that
// (low ^ replicate(c & 1)) & (high ^ replicate(c >> 1)) has a 1 exactly where
// the character equals c. Header fields (deltas) overwrite the first slots.
namespace qrank {

/// Data characters in a QuadRank16 block.
inline constexpr unsigned kQuadBlockChars = 256 - kQuadDeltaChars;

/// All-ones word when bit `bit` of c is set, else zero.
constexpr std::uint64_t plane_selector(unsigned c, unsigned bit) noexcept {
  return std::uint64_t{0} - static_cast<std::uint64_t>((c >> bit) & 1);
}

/// Occurrence bitmap of symbol c in one plane pair.
constexpr std::uint64_t match_word(std::uint64_t low, std::uint64_t high, unsigned c) noexcept {
  return (low ^ plane_selector(c, 0)) & (high ^ plane_selector(c, 1));
}

/// Writes text characters [start, start + 256 - first_slot) into slots
/// [first_slot, 256). Slots below first_slot are filled as symbol 0 and are
/// expected to be overwritten by the caller's header. Characters past the end
/// of the text are encoded as symbol 0.
inline void encode_quad_planes(CacheLine& line, QuadText const& text, std::uint64_t start,
                               unsigned first_slot) noexcept {
  for (unsigned pair = 0; pair < 4; ++pair) {
    std::uint64_t low = 0;
    std::uint64_t high = 0;
    unsigned const s0 = std::max(64 * pair, first_slot);
    unsigned const s1 = 64 * pair + 64;
    if (s0 < s1) {
      std::uint64_t const pos = start + (s0 - first_slot);
      unsigned const len = s1 - s0;
      std::uint64_t const a = text.packed32(pos);
      std::uint64_t const b = text.packed32(pos + 32);
      std::uint64_t const lo_bits = gather_even_bits(a) | (std::uint64_t{gather_even_bits(b)} << 32);
      std::uint64_t const hi_bits = gather_even_bits(a >> 1) | (std::uint64_t{gather_even_bits(b >> 1)} << 32);
      unsigned const shift = s0 - 64 * pair;
      std::uint64_t const keep = bit_range(0, len);
      low = (lo_bits & keep) << shift;
      high = (hi_bits & keep) << shift;
      // past-the-end characters read as zero, i.e. symbol 0
    }
    line.words[2 * pair] = ~low;
    line.words[2 * pair + 1] = ~high;
  }
}

/// Number of characters equal to c in slots [lo, hi) of an encoded line.
inline std::uint64_t count_in_slots(CacheLine const& line, unsigned c, unsigned lo, unsigned hi) noexcept {
  std::uint64_t total = 0;
  for (unsigned pair = lo / 64; pair < 4 && 64 * pair < hi; ++pair) {
    unsigned const a = std::max(lo, 64 * pair) - 64 * pair;
    unsigned const b = std::min(hi, 64 * pair + 64) - 64 * pair;
    std::uint64_t const m = match_word(line.words[2 * pair], line.words[2 * pair + 1], c);
    total += static_cast<std::uint64_t>(std::popcount(m & bit_range(a, b)));
  }
  return total;
}

/// QuadRank16 delta slot for symbol c: 16-bit lanes 0, 1, 4, 5 of the line,
/// i.e. the low 32 bits of words 0 and 1.
constexpr unsigned quad16_delta_word(unsigned c) noexcept { return c >> 1; }
constexpr unsigned quad16_delta_shift(unsigned c) noexcept { return 16 * (c & 1); }

inline void store_quad16_deltas(CacheLine& line, std::array<std::uint16_t, 4> const& deltas) noexcept {
  line.words[0] = (line.words[0] & ~bit_range(0, 32)) | deltas[0] | (std::uint64_t{deltas[1]} << 16);
  line.words[1] = (line.words[1] & ~bit_range(0, 32)) | deltas[2] | (std::uint64_t{deltas[3]} << 16);
}

inline std::uint64_t load_quad16_delta(CacheLine const& line, unsigned c) noexcept {
  return (line.words[quad16_delta_word(c)] >> quad16_delta_shift(c)) & 0xFFFF;
}

/// Encodes one QuadRank16 block from 224 explicit symbols and its deltas.
inline CacheLine encode_quad_block(std::span<std::uint8_t const, kQuadBlockChars> chars,
                                   std::array<std::uint16_t, 4> const& deltas) {
  QuadText const packed = pack_quad(chars);
  CacheLine line;
  encode_quad_planes(line, packed, 0, kQuadDeltaChars);
  store_quad16_deltas(line, deltas);
  return line;
}

} // namespace qrank
