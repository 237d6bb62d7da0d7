#pragma once

#include "qrank/bits.hpp"
#include "qrank/io.hpp"
#include "qrank/masks.hpp"
#include "qrank/text.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string_view>
#include <type_traits>
#include <vector>

namespace qrank {

/// Superblock offsets are stored shifted right by this many bits; the
/// remainder is folded into every block delta of the superblock.
inline constexpr unsigned kBiShift = 11;

// Geometry of one BiRank layout. Deltas sit at the start of the line, data
// bits fill the rest. One-delta layouts anchor at the line middle (bit 256)
// and popcount half a line; two-delta layouts anchor at bits 128 and 384 and
// popcount a quarter line.
namespace birank_layout {

template <class DeltaT, unsigned NumDeltas, std::uint64_t BlocksPerSuperblock,
          std::uint32_t Tag>
struct Layout {
  using Delta = DeltaT;
  static constexpr unsigned kDeltas = NumDeltas;
  static constexpr unsigned kHeaderBits = 8 * sizeof(Delta) * NumDeltas;
  static constexpr unsigned kDataBits = 512 - kHeaderBits;
  /// 0 means absolute deltas and no superblock array.
  static constexpr std::uint64_t kBlocksPerSuperblock = BlocksPerSuperblock;
  static constexpr bool kHasSuperblocks = BlocksPerSuperblock != 0;
  static constexpr std::uint32_t kTag = Tag;

  static_assert(NumDeltas == 1 || NumDeltas == 2);
  static_assert(kHeaderBits <= 128);

  /// Line bit where delta k points.
  static constexpr unsigned anchor(unsigned k) noexcept {
    return NumDeltas == 1 ? 256 : 128 + 256 * k;
  }
};

using Rank16 = Layout<std::uint16_t, 1, 128, 1>;
using Rank16x2 = Layout<std::uint16_t, 2, 128, 2>;
using Rank32 = Layout<std::uint32_t, 1, std::uint64_t{1} << 22, 3>;
using Rank32x2 = Layout<std::uint32_t, 2, std::uint64_t{1} << 22, 4>;
using Rank64 = Layout<std::uint64_t, 1, 0, 5>;
using Rank64x2 = Layout<std::uint64_t, 2, 0, 6>;

} // namespace birank_layout

namespace detail {

/// Blocks are grouped in units of this many for parallel construction; all
/// superblock sizes are multiples of it.
inline constexpr std::uint64_t kBuildUnitBlocks = 128;

/// Copies the text into the data region [header_bits, 512) of each line,
/// leaving the header zero, and returns the exclusive prefix sum of 1-bits
/// per build unit (one extra trailing entry holds the total).
inline std::vector<std::uint64_t> fill_bi_lines(BitText const& text, LineVector& lines,
                                                unsigned header_bits, unsigned threads) {
  std::uint64_t const data_bits = 512 - header_bits;
  std::uint64_t const units = (lines.size() + kBuildUnitBlocks - 1) / kBuildUnitBlocks;
  std::vector<std::uint64_t> unit_ones(units + 1, 0);
  parallel_chunks(units, threads, [&](std::size_t ub, std::size_t ue) {
    for (std::size_t u = ub; u < ue; ++u) {
      std::uint64_t ones = 0;
      std::uint64_t const jb = u * kBuildUnitBlocks;
      std::uint64_t const je = std::min<std::uint64_t>(lines.size(), jb + kBuildUnitBlocks);
      for (std::uint64_t j = jb; j < je; ++j) {
        CacheLine& line = lines[j];
        std::uint64_t const start = j * data_bits;
        for (unsigned w = header_bits / 64; w < 8; ++w) {
          unsigned const lo = std::max(header_bits, 64 * w);
          unsigned const len = 64 * w + 64 - lo;
          std::uint64_t const v = text.bits(start + (lo - header_bits), len);
          line.words[w] = v << (lo - 64 * w);
          ones += static_cast<std::uint64_t>(std::popcount(line.words[w]));
        }
      }
      unit_ones[u] = ones;
    }
  });
  std::exclusive_scan(unit_ones.begin(), unit_ones.end(), unit_ones.begin(), std::uint64_t{0});
  return unit_ones;
}

/// 1-bits in line bits [0, bit) of a line whose header is still zero.
inline std::uint64_t line_prefix_ones(CacheLine const& line, unsigned bit) noexcept {
  std::uint64_t c = 0;
  for (unsigned w = 0; w < 8 && 64 * w < bit; ++w) {
    c += static_cast<std::uint64_t>(std::popcount(line.words[w] & bit_range(0, std::min(64u, bit - 64 * w))));
  }
  return c;
}

inline std::uint64_t line_ones(CacheLine const& line) noexcept { return line_prefix_ones(line, 512); }

} // namespace detail

/// Constant-time rank over a binary text using one cache line per query.
///
/// Every 64-byte block stores its delta(s) inline next to the text bits, so a
/// query reads exactly one block line plus one entry of a small superblock
/// array that stays cache resident. Deltas count the 1-bits up to an anchor
/// inside the block; a query adds or subtracts a masked popcount of the bits
/// between the anchor and q.
template <class L>
class BiRank {
public:
  using Layout = L;
  static constexpr std::uint64_t kBlockBits = L::kDataBits;
  static constexpr std::uint64_t kSuperblockBits =
      L::kHasSuperblocks ? L::kBlocksPerSuperblock * kBlockBits : 0;

  static_assert(!L::kHasSuperblocks ||
                L::kBlocksPerSuperblock % detail::kBuildUnitBlocks == 0);
  static_assert(!L::kHasSuperblocks ||
                kSuperblockBits + ((1u << kBiShift) - 1) <= std::numeric_limits<typename L::Delta>::max());

  BiRank() = default;

  /// Builds the structure. The result does not depend on `threads`.
  static BiRank build(BitText const& text, unsigned threads = 1) {
    BiRank r;
    r.n_ = text.size();
    r.blocks_.resize(r.n_ / kBlockBits + 1);
    require_line_aligned(r.blocks_);
    std::vector<std::uint64_t> const unit_rank =
        detail::fill_bi_lines(text, r.blocks_, L::kHeaderBits, threads);

    if constexpr (L::kHasSuperblocks) {
      std::uint64_t const units_per_sb = L::kBlocksPerSuperblock / detail::kBuildUnitBlocks;
      std::uint64_t const num_sb = (r.blocks_.size() + L::kBlocksPerSuperblock - 1) / L::kBlocksPerSuperblock;
      r.superblocks_.resize(num_sb);
      for (std::uint64_t i = 0; i < num_sb; ++i) {
        r.superblocks_[i] = static_cast<std::uint32_t>(unit_rank[i * units_per_sb] >> kBiShift);
      }
    }

    std::uint64_t const units = unit_rank.size() - 1;
    parallel_chunks(units, threads, [&](std::size_t ub, std::size_t ue) {
      for (std::size_t u = ub; u < ue; ++u) {
        std::uint64_t running = unit_rank[u];
        std::uint64_t const jb = u * detail::kBuildUnitBlocks;
        std::uint64_t const je = std::min<std::uint64_t>(r.blocks_.size(), jb + detail::kBuildUnitBlocks);
        for (std::uint64_t j = jb; j < je; ++j) {
          CacheLine& line = r.blocks_[j];
          std::uint64_t const base = r.superblock_base(j);
          std::uint64_t const block_ones = detail::line_ones(line);
          std::array<std::uint64_t, L::kDeltas> deltas{};
          for (unsigned k = 0; k < L::kDeltas; ++k) {
            deltas[k] = running + detail::line_prefix_ones(line, L::anchor(k)) - base;
          }
          for (unsigned k = 0; k < L::kDeltas; ++k) {
            store_delta(line, k, deltas[k]);
          }
          running += block_ones;
        }
      }
    });
    return r;
  }

  /// Number of 1-bits in text[0, q), for 0 <= q <= size().
  [[nodiscard]] std::uint64_t rank(std::uint64_t q) const noexcept {
    QRANK_ASSERT(q <= n_);
    q = std::min(q, n_);
    std::uint64_t const j = q / kBlockBits;
    unsigned const p = L::kHeaderBits + static_cast<unsigned>(q - j * kBlockBits);
    CacheLine const& line = blocks_[j];
    std::uint64_t const base = superblock_base(j);
    if constexpr (L::kDeltas == 1) {
      unsigned const half = p >> 8;
      auto const& m = kBiMasks[p].words;
      std::uint64_t const* w = &line.words[4 * half];
      std::uint64_t const c = static_cast<std::uint64_t>(std::popcount(w[0] & m[0])) +
                              static_cast<std::uint64_t>(std::popcount(w[1] & m[1])) +
                              static_cast<std::uint64_t>(std::popcount(w[2] & m[2])) +
                              static_cast<std::uint64_t>(std::popcount(w[3] & m[3]));
      return base + load_delta(line, 0) + negate_if(c, half == 0);
    } else {
      unsigned const quarter = p >> 7;
      auto const& m = kQuarterMasks[p].words;
      std::uint64_t const* w = &line.words[2 * quarter];
      std::uint64_t const c = static_cast<std::uint64_t>(std::popcount(w[0] & m[0])) +
                              static_cast<std::uint64_t>(std::popcount(w[1] & m[1]));
      return base + load_delta(line, p >> 8) + negate_if(c, (quarter & 1) == 0);
    }
  }

  /// Number of 0-bits in text[0, q).
  [[nodiscard]] std::uint64_t rank0(std::uint64_t q) const noexcept { return q - rank(q); }

  /// Hints the cache lines rank(q) will read. No observable effect.
  void prefetch(std::uint64_t q) const noexcept {
    q = std::min(q, n_);
    std::uint64_t const j = q / kBlockBits;
    prefetch_read(&blocks_[j]);
    if constexpr (L::kHasSuperblocks) {
      prefetch_read(&superblocks_[j / L::kBlocksPerSuperblock]);
    }
  }

  [[nodiscard]] std::uint64_t size() const noexcept { return n_; }
  [[nodiscard]] std::span<CacheLine const> blocks() const noexcept { return blocks_; }
  [[nodiscard]] std::span<std::uint32_t const> superblocks() const noexcept { return superblocks_; }

  /// Delta k of block j as stored.
  [[nodiscard]] std::uint64_t delta(std::uint64_t j, unsigned k = 0) const noexcept {
    return load_delta(blocks_[j], k);
  }

  [[nodiscard]] std::uint64_t size_in_bytes() const noexcept {
    return blocks_.size() * sizeof(CacheLine) + superblocks_.size() * sizeof(std::uint32_t);
  }

  /// Auxiliary space relative to the packed input.
  [[nodiscard]] double overhead() const noexcept {
    double const input = static_cast<double>(n_) / 8.0;
    return input == 0 ? 0.0 : (static_cast<double>(size_in_bytes()) - input) / input;
  }

  friend bool operator==(BiRank const&, BiRank const&) = default;

  void save(std::ostream& out) const {
    io::write_magic(out, kMagic, kVersion);
    io::write_le<std::uint32_t>(out, L::kTag);
    io::write_le<std::uint64_t>(out, n_);
    io::write_le<std::uint64_t>(out, kBlockBits);
    io::write_le<std::uint64_t>(out, kSuperblockBits);
    io::write_le<std::uint64_t>(out, superblocks_.size());
    io::write_le<std::uint64_t>(out, blocks_.size());
    io::write_array<std::uint32_t>(out, superblocks_);
    io::write_lines(out, blocks_);
  }

  static BiRank load(std::istream& in) {
    io::expect_magic(in, kMagic, kVersion);
    if (io::read_le<std::uint32_t>(in) != L::kTag) {
      throw format_error("stream holds a different BiRank variant");
    }
    BiRank r;
    r.n_ = io::read_le<std::uint64_t>(in);
    check_bit_capacity(r.n_);
    if (io::read_le<std::uint64_t>(in) != kBlockBits || io::read_le<std::uint64_t>(in) != kSuperblockBits) {
      throw format_error("BiRank geometry mismatch");
    }
    std::uint64_t const blocks = r.n_ / kBlockBits + 1;
    std::uint64_t const sbs =
        L::kHasSuperblocks ? (blocks + L::kBlocksPerSuperblock - 1) / L::kBlocksPerSuperblock : 0;
    if (io::read_le<std::uint64_t>(in) != sbs || io::read_le<std::uint64_t>(in) != blocks) {
      throw format_error("BiRank array sizes inconsistent with length");
    }
    r.superblocks_.resize(sbs);
    r.blocks_.resize(blocks);
    require_line_aligned(r.blocks_);
    io::read_array<std::uint32_t>(in, r.superblocks_);
    io::read_lines(in, r.blocks_);
#ifndef NDEBUG
    r.validate();
#endif
    return r;
  }

  /// Cheap structural checks: superblock offsets are non-decreasing and the
  /// header region never contains text bits. Throws format_error.
  void validate() const {
    if (!std::is_sorted(superblocks_.begin(), superblocks_.end())) {
      throw format_error("superblock offsets not monotone");
    }
    std::uint64_t const last_bits = n_ - (blocks_.size() - 1) * kBlockBits;
    CacheLine const& last = blocks_.back();
    for (unsigned w = 0; w < 8; ++w) {
      unsigned const lo = std::max(L::kHeaderBits + static_cast<unsigned>(last_bits), 64 * w);
      if (lo < 64 * w + 64 && (last.words[w] & bit_range(lo - 64 * w, 64)) != 0) {
        throw format_error("padding bits past the end of the text are set");
      }
    }
  }

private:
  static constexpr io::Magic kMagic = io::make_magic("QRBIRANK");
  static constexpr std::uint32_t kVersion = 1;
  static constexpr unsigned kDeltaWidth = 8 * sizeof(typename L::Delta);

  [[nodiscard]] std::uint64_t superblock_base(std::uint64_t j) const noexcept {
    if constexpr (L::kHasSuperblocks) {
      return std::uint64_t{superblocks_[j / L::kBlocksPerSuperblock]} << kBiShift;
    } else {
      return 0;
    }
  }

  static std::uint64_t load_delta(CacheLine const& line, unsigned k) noexcept {
    if constexpr (kDeltaWidth == 64) {
      return line.words[k];
    } else {
      return (line.words[0] >> (kDeltaWidth * k)) & bit_range(0, kDeltaWidth);
    }
  }

  static void store_delta(CacheLine& line, unsigned k, std::uint64_t v) noexcept {
    QRANK_ASSERT(v <= std::numeric_limits<typename L::Delta>::max());
    if constexpr (kDeltaWidth == 64) {
      line.words[k] = v;
    } else {
      line.words[0] |= v << (kDeltaWidth * k);
    }
  }

  LineVector blocks_;
  std::vector<std::uint32_t> superblocks_;
  std::uint64_t n_ = 0;
};

using BiRank16 = BiRank<birank_layout::Rank16>;
using BiRank16x2 = BiRank<birank_layout::Rank16x2>;
using BiRank32 = BiRank<birank_layout::Rank32>;
using BiRank32x2 = BiRank<birank_layout::Rank32x2>;
using BiRank64 = BiRank<birank_layout::Rank64>;
using BiRank64x2 = BiRank<birank_layout::Rank64x2>;

template <class T>
inline constexpr std::string_view structure_name = "unknown";
template <>
inline constexpr std::string_view structure_name<BiRank16> = "BiRank16";
template <>
inline constexpr std::string_view structure_name<BiRank16x2> = "BiRank16x2";
template <>
inline constexpr std::string_view structure_name<BiRank32> = "BiRank32";
template <>
inline constexpr std::string_view structure_name<BiRank32x2> = "BiRank32x2";
template <>
inline constexpr std::string_view structure_name<BiRank64> = "BiRank64";
template <>
inline constexpr std::string_view structure_name<BiRank64x2> = "BiRank64x2";

} // namespace qrank
