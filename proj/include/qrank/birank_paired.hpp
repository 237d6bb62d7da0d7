#pragma once

#include "qrank/birank.hpp"

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

namespace qrank {

/// BiRank16 with paired superblocks: each superblock spans 256 blocks and its
/// shifted offset counts up to the superblock middle, halving the size of the
/// superblock array. Deltas of blocks in the lower half carry a constant bias
/// so that they stay non-negative; queries remove it again.
class BiRankPaired {
public:
  static constexpr std::uint64_t kBlockBits = 496;
  static constexpr std::uint64_t kBlocksPerSuperblock = 256;
  static constexpr std::uint64_t kSuperblockBits = kBlocksPerSuperblock * kBlockBits;
  static constexpr std::uint64_t kHalfSuperblockBits = kSuperblockBits / 2;
  /// Anchor of a block, counted in data bits from its start.
  static constexpr std::uint64_t kAnchor = 240;
  /// Bias added to deltas of lower-half blocks.
  static constexpr std::uint64_t kLowerBias = kHalfSuperblockBits - kAnchor;

  BiRankPaired() = default;

  static BiRankPaired build(BitText const& text, unsigned threads = 1) {
    BiRankPaired r;
    r.n_ = text.size();
    r.blocks_.resize(r.n_ / kBlockBits + 1);
    require_line_aligned(r.blocks_);
    std::vector<std::uint64_t> const unit_rank =
        detail::fill_bi_lines(text, r.blocks_, kBiDeltaBits, threads);
    std::uint64_t const units = unit_rank.size() - 1;
    std::uint64_t const total = unit_rank.back();

    // A build unit is exactly half a superblock, so the middle of superblock
    // i is the start of unit 2i + 1 (or the end of the text).
    static_assert(kBlocksPerSuperblock == 2 * detail::kBuildUnitBlocks);
    std::uint64_t const num_sb = (r.blocks_.size() + kBlocksPerSuperblock - 1) / kBlocksPerSuperblock;
    r.superblocks_.resize(num_sb);
    for (std::uint64_t i = 0; i < num_sb; ++i) {
      std::uint64_t const mid_rank = 2 * i + 1 < units ? unit_rank[2 * i + 1] : total;
      r.superblocks_[i] = static_cast<std::uint32_t>(mid_rank >> kBiShift);
    }

    parallel_chunks(units, threads, [&](std::size_t ub, std::size_t ue) {
      for (std::size_t u = ub; u < ue; ++u) {
        std::uint64_t running = unit_rank[u];
        std::uint64_t const jb = u * detail::kBuildUnitBlocks;
        std::uint64_t const je = std::min<std::uint64_t>(r.blocks_.size(), jb + detail::kBuildUnitBlocks);
        for (std::uint64_t j = jb; j < je; ++j) {
          CacheLine& line = r.blocks_[j];
          std::uint64_t const at_anchor = running + detail::line_prefix_ones(line, 256);
          std::uint64_t const base = std::uint64_t{r.superblocks_[j / kBlocksPerSuperblock]} << kBiShift;
          std::uint64_t const bias = is_lower_half(j) ? kLowerBias : 0;
          std::uint64_t const d = at_anchor + bias - base;
          QRANK_ASSERT(d < (std::uint64_t{1} << 16));
          running += detail::line_ones(line);
          line.words[0] |= d;
        }
      }
    });
    return r;
  }

  [[nodiscard]] std::uint64_t rank(std::uint64_t q) const noexcept {
    QRANK_ASSERT(q <= n_);
    q = std::min(q, n_);
    std::uint64_t const j = q / kBlockBits;
    unsigned const p = kBiDeltaBits + static_cast<unsigned>(q - j * kBlockBits);
    CacheLine const& line = blocks_[j];
    std::uint64_t const base = std::uint64_t{superblocks_[j / kBlocksPerSuperblock]} << kBiShift;
    std::uint64_t const bias = kLowerBias & (std::uint64_t{0} - static_cast<std::uint64_t>(is_lower_half(j)));
    SignedCount const c = masked_half_popcount_bi(line, p);
    return base + (line.words[0] & 0xFFFF) - bias + negate_if(c.count, c.sign < 0);
  }

  void prefetch(std::uint64_t q) const noexcept {
    q = std::min(q, n_);
    std::uint64_t const j = q / kBlockBits;
    prefetch_read(&blocks_[j]);
    prefetch_read(&superblocks_[j / kBlocksPerSuperblock]);
  }

  [[nodiscard]] std::uint64_t size() const noexcept { return n_; }
  [[nodiscard]] std::span<std::uint32_t const> superblocks() const noexcept { return superblocks_; }
  [[nodiscard]] std::span<CacheLine const> blocks() const noexcept { return blocks_; }
  [[nodiscard]] std::uint64_t delta(std::uint64_t j) const noexcept { return blocks_[j].words[0] & 0xFFFF; }

  [[nodiscard]] std::uint64_t size_in_bytes() const noexcept {
    return blocks_.size() * sizeof(CacheLine) + superblocks_.size() * sizeof(std::uint32_t);
  }

  [[nodiscard]] double overhead() const noexcept {
    double const input = static_cast<double>(n_) / 8.0;
    return input == 0 ? 0.0 : (static_cast<double>(size_in_bytes()) - input) / input;
  }

  static constexpr bool is_lower_half(std::uint64_t j) noexcept {
    return j % kBlocksPerSuperblock < kBlocksPerSuperblock / 2;
  }

  friend bool operator==(BiRankPaired const&, BiRankPaired const&) = default;

  void save(std::ostream& out) const {
    io::write_magic(out, kMagic, kVersion);
    io::write_le<std::uint64_t>(out, n_);
    io::write_le<std::uint64_t>(out, superblocks_.size());
    io::write_array<std::uint32_t>(out, superblocks_);
    io::write_lines(out, blocks_);
  }

  static BiRankPaired load(std::istream& in) {
    io::expect_magic(in, kMagic, kVersion);
    BiRankPaired r;
    r.n_ = io::read_le<std::uint64_t>(in);
    check_bit_capacity(r.n_);
    r.blocks_.resize(r.n_ / kBlockBits + 1);
    std::uint64_t const sbs = (r.blocks_.size() + kBlocksPerSuperblock - 1) / kBlocksPerSuperblock;
    if (io::read_le<std::uint64_t>(in) != sbs) {
      throw format_error("paired BiRank superblock count inconsistent with length");
    }
    require_line_aligned(r.blocks_);
    r.superblocks_.resize(sbs);
    io::read_array<std::uint32_t>(in, r.superblocks_);
    io::read_lines(in, r.blocks_);
    return r;
  }

private:
  static constexpr io::Magic kMagic = io::make_magic("QRBIPAIR");
  static constexpr std::uint32_t kVersion = 1;

  LineVector blocks_;
  std::vector<std::uint32_t> superblocks_;
  std::uint64_t n_ = 0;
};

template <>
inline constexpr std::string_view structure_name<BiRankPaired> = "BiRank16Paired";

} // namespace qrank
