#pragma once

#include "qrank/bits.hpp"
#include "qrank/birank.hpp"
#include "qrank/io.hpp"
#include "qrank/masks.hpp"
#include "qrank/quad_block.hpp"
#include "qrank/text.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#if defined(__AVX2__)
#  include <immintrin.h>
#  define QRANK_HAVE_AVX2 1
#else
#  define QRANK_HAVE_AVX2 0
#endif

namespace qrank {

inline constexpr unsigned kQuadShift = 13;

using Ranks4 = std::array<std::uint64_t, 4>;

namespace quadrank_layout {

enum class Kind {
  /// Four 16-bit deltas to the line middle; count half a line.
  Middle16,
  /// Three 64-character groups; 24-bit delta to the end of group 0 and an
  /// 8-bit delta from there to the end of group 1.
  Split24_8,
  /// Four absolute 64-bit ranks to the middle of two 64-character groups.
  Absolute64,
};

struct Rank16 {
  static constexpr Kind kKind = Kind::Middle16;
  static constexpr unsigned kFirstSlot = 32;
  static constexpr std::uint64_t kBlocksPerSuperblock = 256;
  static constexpr std::array<unsigned, 1> kAnchors{96};
  static constexpr std::uint64_t kMaxDelta = 0xFFFF;
  static constexpr std::uint32_t kTag = 1;
};

struct Rank24_8 {
  static constexpr Kind kKind = Kind::Split24_8;
  static constexpr unsigned kFirstSlot = 64;
  static constexpr std::uint64_t kBlocksPerSuperblock = std::uint64_t{1} << 16;
  static constexpr std::array<unsigned, 2> kAnchors{64, 128};
  static constexpr std::uint64_t kMaxDelta = (std::uint64_t{1} << 24) - 1;
  static constexpr std::uint32_t kTag = 2;
};

struct Rank64 {
  static constexpr Kind kKind = Kind::Absolute64;
  static constexpr unsigned kFirstSlot = 128;
  static constexpr std::uint64_t kBlocksPerSuperblock = 0;
  static constexpr std::array<unsigned, 1> kAnchors{64};
  static constexpr std::uint64_t kMaxDelta = std::numeric_limits<std::uint64_t>::max();
  static constexpr std::uint32_t kTag = 3;
};

} // namespace quadrank_layout

namespace detail {

inline constexpr std::uint64_t kQuadBuildUnitBlocks = 256;

/// `len` bits at offset `off` of the 128-bit value (hi:lo).
constexpr std::uint64_t read_field128(std::uint64_t lo, std::uint64_t hi, unsigned off, unsigned len) noexcept {
  std::uint64_t v;
  if (off >= 64) {
    v = hi >> (off - 64);
  } else if (off == 0) {
    v = lo;
  } else {
    v = (lo >> off) | (hi << (64 - off));
  }
  return v & bit_range(0, len);
}

constexpr void write_field128(std::uint64_t& lo, std::uint64_t& hi, unsigned off, unsigned len,
                              std::uint64_t v) noexcept {
  v &= bit_range(0, len);
  if (off >= 64) {
    hi |= v << (off - 64);
  } else {
    lo |= v << off;
    if (off + len > 64) {
      hi |= v >> (64 - off);
    }
  }
}

#if QRANK_HAVE_AVX2
/// Per-byte popcount by 4-bit table lookup (Mula).
inline __m256i popcount_bytes(__m256i v) noexcept {
  __m256i const table = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                         0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  __m256i const nibble = _mm256_set1_epi8(0x0F);
  __m256i const lo = _mm256_and_si256(v, nibble);
  __m256i const hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), nibble);
  return _mm256_add_epi8(_mm256_shuffle_epi8(table, lo), _mm256_shuffle_epi8(table, hi));
}

/// Occurrences of symbol c in lane c, for `Pairs` consecutive plane pairs
/// starting at `words`, each restricted by the matching mask word.
template <unsigned Pairs>
inline __m256i count4(std::uint64_t const* words, std::uint64_t const* masks) noexcept {
  // lane c selects c & 1 from the low plane and c >> 1 from the high plane
  __m256i const sel_low = _mm256_set_epi64x(-1, 0, -1, 0);
  __m256i const sel_high = _mm256_set_epi64x(-1, -1, 0, 0);
  __m256i bytes = _mm256_setzero_si256();
  for (unsigned k = 0; k < Pairs; ++k) {
    __m256i const low = _mm256_xor_si256(_mm256_set1_epi64x(static_cast<long long>(words[2 * k])), sel_low);
    __m256i const high = _mm256_xor_si256(_mm256_set1_epi64x(static_cast<long long>(words[2 * k + 1])), sel_high);
    __m256i const m = _mm256_set1_epi64x(static_cast<long long>(masks[k]));
    bytes = _mm256_add_epi8(bytes, popcount_bytes(_mm256_and_si256(_mm256_and_si256(low, high), m)));
  }
  return _mm256_sad_epu8(bytes, _mm256_setzero_si256());
}

inline Ranks4 store_ranks4(__m256i v) noexcept {
  Ranks4 out;
  _mm256_storeu_si256(reinterpret_cast<__m256i*>(out.data()), v);
  return out;
}
#endif

} // namespace detail

/// Constant-time rank over a DNA text (symbols 0..3), one cache line per
/// query. Characters are stored in transposed, negated planes; per-symbol
/// deltas are inlined in each line and per-symbol shifted offsets live in a
/// small superblock array.
template <class L>
class QuadRank {
public:
  using Layout = L;
  static constexpr std::uint64_t kBlockChars = 256 - L::kFirstSlot;
  static constexpr bool kHasSuperblocks = L::kBlocksPerSuperblock != 0;
  static constexpr std::uint64_t kSuperblockChars = kHasSuperblocks ? L::kBlocksPerSuperblock * kBlockChars : 0;

  static_assert(!kHasSuperblocks || L::kBlocksPerSuperblock % detail::kQuadBuildUnitBlocks == 0);
  static_assert(!kHasSuperblocks || kSuperblockChars + ((1u << kQuadShift) - 1) <= L::kMaxDelta);

  QuadRank() = default;

  static QuadRank build(QuadText const& text, unsigned threads = 1) {
    QuadRank r;
    r.n_ = text.size();
    r.blocks_.resize(r.n_ / kBlockChars + 1);
    require_line_aligned(r.blocks_);

    std::uint64_t const units = (r.blocks_.size() + detail::kQuadBuildUnitBlocks - 1) / detail::kQuadBuildUnitBlocks;
    std::vector<Ranks4> unit_rank(units + 1, Ranks4{});
    parallel_chunks(units, threads, [&](std::size_t ub, std::size_t ue) {
      for (std::size_t u = ub; u < ue; ++u) {
        Ranks4 counts{};
        auto [jb, je] = r.unit_blocks(u);
        for (std::uint64_t j = jb; j < je; ++j) {
          CacheLine& line = r.blocks_[j];
          encode_quad_planes(line, text, j * kBlockChars, L::kFirstSlot);
          for (unsigned c = 0; c < 4; ++c) {
            counts[c] += count_in_slots(line, c, L::kFirstSlot, 256);
          }
        }
        unit_rank[u] = counts;
      }
    });
    Ranks4 acc{};
    for (auto& u : unit_rank) {
      Ranks4 const here = u;
      u = acc;
      for (unsigned c = 0; c < 4; ++c) {
        acc[c] += here[c];
      }
    }

    if constexpr (kHasSuperblocks) {
      std::uint64_t const units_per_sb = L::kBlocksPerSuperblock / detail::kQuadBuildUnitBlocks;
      std::uint64_t const num_sb = (r.blocks_.size() + L::kBlocksPerSuperblock - 1) / L::kBlocksPerSuperblock;
      r.superblocks_.resize(num_sb);
      for (std::uint64_t i = 0; i < num_sb; ++i) {
        for (unsigned c = 0; c < 4; ++c) {
          r.superblocks_[i][c] = static_cast<std::uint32_t>(unit_rank[i * units_per_sb][c] >> kQuadShift);
        }
      }
    }

    parallel_chunks(units, threads, [&](std::size_t ub, std::size_t ue) {
      for (std::size_t u = ub; u < ue; ++u) {
        Ranks4 running = unit_rank[u];
        auto [jb, je] = r.unit_blocks(u);
        for (std::uint64_t j = jb; j < je; ++j) {
          CacheLine& line = r.blocks_[j];
          Ranks4 const base = r.superblock_base4(j);
          std::array<Ranks4, L::kAnchors.size()> values{};
          Ranks4 block_counts{};
          for (unsigned c = 0; c < 4; ++c) {
            for (std::size_t k = 0; k < L::kAnchors.size(); ++k) {
              values[k][c] = running[c] + count_in_slots(line, c, L::kFirstSlot, L::kFirstSlot + L::kAnchors[k]) - base[c];
              QRANK_ASSERT(values[k][c] <= L::kMaxDelta);
            }
            block_counts[c] = count_in_slots(line, c, L::kFirstSlot, 256);
          }
          store_header(line, values);
          for (unsigned c = 0; c < 4; ++c) {
            running[c] += block_counts[c];
          }
        }
      }
    });
    return r;
  }

  /// Occurrences of symbol c in text[0, q), for 0 <= q <= size().
  [[nodiscard]] std::uint64_t rank(std::uint64_t q, unsigned c) const noexcept {
    QRANK_ASSERT(q <= n_ && c < 4);
    q = std::min(q, n_);
    c &= 3;
    std::uint64_t const j = q / kBlockChars;
    unsigned const pos = static_cast<unsigned>(q - j * kBlockChars);
    CacheLine const& line = blocks_[j];
    std::uint64_t const base = superblock_base(j, c);
    std::uint64_t const cl = plane_selector(c, 0);
    std::uint64_t const ch = plane_selector(c, 1);
    if constexpr (L::kKind == quadrank_layout::Kind::Middle16) {
      unsigned const slot = L::kFirstSlot + pos;
      unsigned const half = slot >> 7;
      auto const& m = kQuadMasks[slot].words;
      std::uint64_t const* w = &line.words[4 * half];
      std::uint64_t const cnt = static_cast<std::uint64_t>(std::popcount((w[0] ^ cl) & (w[1] ^ ch) & m[0])) +
                                static_cast<std::uint64_t>(std::popcount((w[2] ^ cl) & (w[3] ^ ch) & m[1]));
      return base + load_quad16_delta(line, c) + negate_if(cnt, half == 0);
    } else {
      unsigned const group = pos >> 6;
      std::uint64_t const* w = &line.words[L::kFirstSlot / 32 + 2 * group];
      std::uint64_t const m = kGroupMasks[(pos & 63) | (group != 0 ? 64u : 0u)];
      std::uint64_t const cnt = static_cast<std::uint64_t>(std::popcount((w[0] ^ cl) & (w[1] ^ ch) & m));
      return base + group_delta(line, c, group) + negate_if(cnt, group == 0);
    }
  }

  /// Ranks of all four symbols. Uses the SIMD nibble-lookup path when the
  /// build targets AVX2, otherwise the scalar path.
  [[nodiscard]] Ranks4 rank4(std::uint64_t q) const noexcept {
#if QRANK_HAVE_AVX2
    return rank4_simd(q);
#else
    return rank4_scalar(q);
#endif
  }

  /// Portable rank4: one masked plane popcount per symbol.
  [[nodiscard]] Ranks4 rank4_scalar(std::uint64_t q) const noexcept {
    return {rank(q, 0), rank(q, 1), rank(q, 2), rank(q, 3)};
  }

#if QRANK_HAVE_AVX2
  /// All four ranks in one pass, one 64-bit lane per symbol.
  [[nodiscard]] Ranks4 rank4_simd(std::uint64_t q) const noexcept {
    QRANK_ASSERT(q <= n_);
    q = std::min(q, n_);
    std::uint64_t const j = q / kBlockChars;
    unsigned const pos = static_cast<unsigned>(q - j * kBlockChars);
    CacheLine const& line = blocks_[j];

    __m256i base = _mm256_setzero_si256();
    if constexpr (kHasSuperblocks) {
      __m128i const s = _mm_loadu_si128(reinterpret_cast<__m128i const*>(superblocks_[j / L::kBlocksPerSuperblock].data()));
      base = _mm256_slli_epi64(_mm256_cvtepu32_epi64(s), kQuadShift);
    }

    __m256i counts;
    __m256i deltas;
    bool negative;
    if constexpr (L::kKind == quadrank_layout::Kind::Middle16) {
      unsigned const slot = L::kFirstSlot + pos;
      unsigned const half = slot >> 7;
      counts = detail::count4<2>(&line.words[4 * half], kQuadMasks[slot].words.data());
      std::uint64_t const w0 = line.words[0];
      std::uint64_t const w1 = line.words[1];
      deltas = _mm256_set_epi64x(static_cast<long long>((w1 >> 16) & 0xFFFF), static_cast<long long>(w1 & 0xFFFF),
                                 static_cast<long long>((w0 >> 16) & 0xFFFF), static_cast<long long>(w0 & 0xFFFF));
      negative = half == 0;
    } else {
      unsigned const group = pos >> 6;
      std::uint64_t const m = kGroupMasks[(pos & 63) | (group != 0 ? 64u : 0u)];
      counts = detail::count4<1>(&line.words[L::kFirstSlot / 32 + 2 * group], &m);
      deltas = _mm256_set_epi64x(static_cast<long long>(group_delta(line, 3, group)),
                                 static_cast<long long>(group_delta(line, 2, group)),
                                 static_cast<long long>(group_delta(line, 1, group)),
                                 static_cast<long long>(group_delta(line, 0, group)));
      negative = group == 0;
    }
    __m256i const sign = _mm256_set1_epi64x(-static_cast<long long>(negative));
    __m256i const signed_counts = _mm256_sub_epi64(_mm256_xor_si256(counts, sign), sign);
    return detail::store_ranks4(_mm256_add_epi64(_mm256_add_epi64(base, deltas), signed_counts));
  }
#endif

  void prefetch(std::uint64_t q) const noexcept {
    q = std::min(q, n_);
    std::uint64_t const j = q / kBlockChars;
    prefetch_read(&blocks_[j]);
    if constexpr (kHasSuperblocks) {
      prefetch_read(&superblocks_[j / L::kBlocksPerSuperblock]);
    }
  }

  [[nodiscard]] std::uint64_t size() const noexcept { return n_; }
  [[nodiscard]] std::span<CacheLine const> blocks() const noexcept { return blocks_; }
  [[nodiscard]] std::span<std::array<std::uint32_t, 4> const> superblocks() const noexcept { return superblocks_; }

  /// Stored delta of block j for symbol c at anchor k (decoded).
  [[nodiscard]] std::uint64_t delta(std::uint64_t j, unsigned c, unsigned k = 0) const noexcept {
    CacheLine const& line = blocks_[j];
    if constexpr (L::kKind == quadrank_layout::Kind::Middle16) {
      return load_quad16_delta(line, c);
    } else {
      return group_delta(line, c, k == 0 ? 1 : 2);
    }
  }

  [[nodiscard]] std::uint64_t size_in_bytes() const noexcept {
    return blocks_.size() * sizeof(CacheLine) + superblocks_.size() * sizeof(std::array<std::uint32_t, 4>);
  }

  /// Auxiliary space relative to the 2-bit packed input.
  [[nodiscard]] double overhead() const noexcept {
    double const input = static_cast<double>(n_) / 4.0;
    return input == 0 ? 0.0 : (static_cast<double>(size_in_bytes()) - input) / input;
  }

  friend bool operator==(QuadRank const&, QuadRank const&) = default;

  void save(std::ostream& out) const {
    io::write_magic(out, kMagic, kVersion);
    io::write_le<std::uint32_t>(out, L::kTag);
    io::write_le<std::uint64_t>(out, n_);
    io::write_le<std::uint64_t>(out, kBlockChars);
    io::write_le<std::uint64_t>(out, kSuperblockChars);
    io::write_le<std::uint64_t>(out, superblocks_.size());
    io::write_le<std::uint64_t>(out, blocks_.size());
    for (unsigned c = 0; c < 4; ++c) {
      for (auto const& s : superblocks_) {
        io::write_le<std::uint32_t>(out, s[c]);
      }
    }
    io::write_lines(out, blocks_);
  }

  static QuadRank load(std::istream& in) {
    io::expect_magic(in, kMagic, kVersion);
    if (io::read_le<std::uint32_t>(in) != L::kTag) {
      throw format_error("stream holds a different QuadRank variant");
    }
    QuadRank r;
    r.n_ = io::read_le<std::uint64_t>(in);
    check_quad_capacity(r.n_);
    if (io::read_le<std::uint64_t>(in) != kBlockChars || io::read_le<std::uint64_t>(in) != kSuperblockChars) {
      throw format_error("QuadRank geometry mismatch");
    }
    std::uint64_t const blocks = r.n_ / kBlockChars + 1;
    std::uint64_t const sbs = kHasSuperblocks ? (blocks + L::kBlocksPerSuperblock - 1) / L::kBlocksPerSuperblock : 0;
    if (io::read_le<std::uint64_t>(in) != sbs || io::read_le<std::uint64_t>(in) != blocks) {
      throw format_error("QuadRank array sizes inconsistent with length");
    }
    r.superblocks_.resize(sbs);
    r.blocks_.resize(blocks);
    require_line_aligned(r.blocks_);
    for (unsigned c = 0; c < 4; ++c) {
      for (auto& s : r.superblocks_) {
        s[c] = io::read_le<std::uint32_t>(in);
      }
    }
    io::read_lines(in, r.blocks_);
#ifndef NDEBUG
    r.validate();
#endif
    return r;
  }

  /// Superblock offsets are non-decreasing per symbol; throws format_error.
  void validate() const {
    for (std::size_t i = 1; i < superblocks_.size(); ++i) {
      for (unsigned c = 0; c < 4; ++c) {
        if (superblocks_[i][c] < superblocks_[i - 1][c]) {
          throw format_error("superblock offsets not monotone");
        }
      }
    }
  }

private:
  static constexpr io::Magic kMagic = io::make_magic("QRQUADRK");
  static constexpr std::uint32_t kVersion = 1;

  [[nodiscard]] std::pair<std::uint64_t, std::uint64_t> unit_blocks(std::uint64_t u) const noexcept {
    std::uint64_t const jb = u * detail::kQuadBuildUnitBlocks;
    return {jb, std::min<std::uint64_t>(blocks_.size(), jb + detail::kQuadBuildUnitBlocks)};
  }

  [[nodiscard]] std::uint64_t superblock_base(std::uint64_t j, unsigned c) const noexcept {
    if constexpr (kHasSuperblocks) {
      return std::uint64_t{superblocks_[j / L::kBlocksPerSuperblock][c]} << kQuadShift;
    } else {
      return 0;
    }
  }

  [[nodiscard]] Ranks4 superblock_base4(std::uint64_t j) const noexcept {
    return {superblock_base(j, 0), superblock_base(j, 1), superblock_base(j, 2), superblock_base(j, 3)};
  }

  /// Delta for symbol c as seen from 64-character group `group`.
  static std::uint64_t group_delta(CacheLine const& line, unsigned c, unsigned group) noexcept {
    if constexpr (L::kKind == quadrank_layout::Kind::Split24_8) {
      std::uint64_t const d24 = detail::read_field128(line.words[0], line.words[1], 24 * c, 24);
      std::uint64_t const d8 = detail::read_field128(line.words[0], line.words[1], 96 + 8 * c, 8);
      return d24 + (d8 & (std::uint64_t{0} - static_cast<std::uint64_t>(group == 2)));
    } else {
      (void)group;
      return line.words[c];
    }
  }

  template <std::size_t K>
  static void store_header(CacheLine& line, std::array<Ranks4, K> const& values) noexcept {
    if constexpr (L::kKind == quadrank_layout::Kind::Middle16) {
      store_quad16_deltas(line, {static_cast<std::uint16_t>(values[0][0]), static_cast<std::uint16_t>(values[0][1]),
                                 static_cast<std::uint16_t>(values[0][2]), static_cast<std::uint16_t>(values[0][3])});
    } else if constexpr (L::kKind == quadrank_layout::Kind::Split24_8) {
      std::uint64_t lo = 0;
      std::uint64_t hi = 0;
      for (unsigned c = 0; c < 4; ++c) {
        detail::write_field128(lo, hi, 24 * c, 24, values[0][c]);
        detail::write_field128(lo, hi, 96 + 8 * c, 8, values[1][c] - values[0][c]);
      }
      line.words[0] = lo;
      line.words[1] = hi;
    } else {
      for (unsigned c = 0; c < 4; ++c) {
        line.words[c] = values[0][c];
      }
    }
  }

  LineVector blocks_;
  std::vector<std::array<std::uint32_t, 4>> superblocks_;
  std::uint64_t n_ = 0;
};

using QuadRank16 = QuadRank<quadrank_layout::Rank16>;
using QuadRank24_8 = QuadRank<quadrank_layout::Rank24_8>;
using QuadRank64 = QuadRank<quadrank_layout::Rank64>;

template <>
inline constexpr std::string_view structure_name<QuadRank16> = "QuadRank16";
template <>
inline constexpr std::string_view structure_name<QuadRank24_8> = "QuadRank24_8";
template <>
inline constexpr std::string_view structure_name<QuadRank64> = "QuadRank64";

} // namespace qrank
