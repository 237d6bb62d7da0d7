#pragma once

#include "qrank/io.hpp"
#include "qrank/quadrank.hpp"
#include "qrank/suffix_array.hpp"
#include "qrank/text.hpp"

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace qrank {

/// Half-open range [lo, hi) of BWT rows.
struct BwtInterval {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  [[nodiscard]] constexpr std::uint64_t size() const noexcept { return hi - lo; }
  [[nodiscard]] constexpr bool empty() const noexcept { return hi == lo; }

  friend constexpr bool operator==(BwtInterval const&, BwtInterval const&) = default;
};

/// Count-only FM-index over DNA. The BWT of text + '$' is stored in a
/// QuadRank16 with the sentinel written as symbol 0; its row is remembered
/// and subtracted from occurrence counts of symbol 0.
class FmIndex {
public:
  static constexpr unsigned kSeedLen = 8;
  static constexpr std::size_t kSeedTableSize = std::size_t{1} << (2 * kSeedLen);
  static constexpr std::size_t kBatchSize = 32;

  FmIndex() = default;

  static FmIndex build(QuadText const& text, unsigned threads = 1) {
    if (text.empty()) {
      throw std::invalid_argument("FM-index needs a non-empty text");
    }
    FmIndex fm;
    fm.n_ = text.size();
    std::vector<std::uint64_t> const sa = build_suffix_array(text);

    std::vector<std::uint64_t> bwt_words((fm.n_ + 1 + 31) / 32, 0);
    for (std::uint64_t i = 0; i < sa.size(); ++i) {
      if (sa[i] == 0) {
        fm.sentinel_pos_ = i;
      } else {
        bwt_words[i / 32] |= std::uint64_t{text[sa[i] - 1]} << (2 * (i % 32));
      }
    }
    fm.bwt_ = QuadRank16::build(QuadText::from_words(std::move(bwt_words), fm.n_ + 1), threads);

    std::array<std::uint64_t, 4> counts{};
    for (std::uint64_t i = 0; i < fm.n_; ++i) {
      ++counts[text[i]];
    }
    fm.c_[0] = 0;
    fm.c_[1] = 1;
    for (unsigned c = 1; c < 4; ++c) {
      fm.c_[c + 1] = fm.c_[c] + counts[c - 1];
    }
    fm.build_seed_table();
    return fm;
  }

  [[nodiscard]] std::uint64_t text_size() const noexcept { return n_; }
  [[nodiscard]] std::uint64_t sentinel_pos() const noexcept { return sentinel_pos_; }
  /// C[0] = 0 for '$'; C[c + 1] = rows whose first character is below symbol c.
  [[nodiscard]] std::array<std::uint64_t, 5> const& c_array() const noexcept { return c_; }
  [[nodiscard]] QuadRank16 const& bwt_rank() const noexcept { return bwt_; }
  [[nodiscard]] BwtInterval full_interval() const noexcept { return {0, n_ + 1}; }

  /// BWT character at row i, nullopt for the sentinel row.
  [[nodiscard]] std::optional<std::uint8_t> bwt_at(std::uint64_t i) const noexcept {
    if (i == sentinel_pos_) {
      return std::nullopt;
    }
    for (unsigned c = 0; c < 4; ++c) {
      if (occ(c, i + 1) != occ(c, i)) {
        return static_cast<std::uint8_t>(c);
      }
    }
    return std::nullopt;
  }

  /// Occurrences of symbol c in BWT[0, i).
  [[nodiscard]] std::uint64_t occ(unsigned c, std::uint64_t i) const noexcept {
    return bwt_.rank(i, c) - static_cast<std::uint64_t>((c == 0) & (i > sentinel_pos_));
  }

  /// LF-mapping of both interval ends: rows prefixed by c followed by the
  /// current pattern suffix.
  [[nodiscard]] BwtInterval backward_extend(BwtInterval iv, unsigned c) const noexcept {
    std::uint64_t const base = c_[c + 1];
    return {base + occ(c, iv.lo), base + occ(c, iv.hi)};
  }

  /// Interval of a packed 8-mer (first character in the high bits).
  [[nodiscard]] BwtInterval seed_interval(std::uint32_t key) const noexcept {
    if (!seed32_.empty()) {
      return {seed32_[2 * key], seed32_[2 * key + 1]};
    }
    return {seed64_[2 * key], seed64_[2 * key + 1]};
  }

  static std::uint32_t pack_seed(std::span<std::uint8_t const> kmer) noexcept {
    std::uint32_t key = 0;
    for (auto s : kmer) {
      key = (key << 2) | (s & 3u);
    }
    return key;
  }

  /// Backward search. With seeding, patterns of at least 8 characters start
  /// from the table interval of their last 8 characters.
  [[nodiscard]] BwtInterval search(std::span<std::uint8_t const> pattern, bool use_seed = true) const noexcept {
    auto [iv, remaining] = start(pattern, use_seed);
    while (remaining > 0 && !iv.empty()) {
      iv = backward_extend(iv, pattern[--remaining]);
    }
    return iv;
  }

  [[nodiscard]] std::uint64_t count(std::span<std::uint8_t const> pattern, bool use_seed = true) const noexcept {
    return search(pattern, use_seed).size();
  }

  /// Searches up to 32 patterns together. Each round first drops finished
  /// queries from the active list (swap-pop) and, when Prefetch is set,
  /// requests the lines the next rank calls need; a second pass then performs
  /// one backward step for every active query.
  template <bool Prefetch>
  void query_batch(std::span<std::span<std::uint8_t const> const> patterns, std::span<BwtInterval> out) const noexcept {
    QRANK_ASSERT(patterns.size() <= kBatchSize && out.size() >= patterns.size());
    std::array<std::uint64_t, kBatchSize> remaining{};
    std::array<std::uint8_t, kBatchSize> active{};
    std::size_t num_active = 0;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      auto [iv, rem] = start(patterns[i], true);
      out[i] = iv;
      remaining[i] = rem;
      active[num_active++] = static_cast<std::uint8_t>(i);
    }
    while (num_active > 0) {
      for (std::size_t k = 0; k < num_active;) {
        std::uint8_t const i = active[k];
        if (remaining[i] == 0 || out[i].empty()) {
          active[k] = active[--num_active];
          continue;
        }
        if constexpr (Prefetch) {
          bwt_.prefetch(out[i].lo);
          bwt_.prefetch(out[i].hi);
        }
        ++k;
      }
      for (std::size_t k = 0; k < num_active; ++k) {
        std::uint8_t const i = active[k];
        out[i] = backward_extend(out[i], patterns[i][--remaining[i]]);
      }
    }
  }

  [[nodiscard]] std::vector<BwtInterval> query_batch(std::span<std::span<std::uint8_t const> const> patterns,
                                                     bool prefetch = true) const {
    std::vector<BwtInterval> out(patterns.size());
    if (prefetch) {
      query_batch<true>(patterns, out);
    } else {
      query_batch<false>(patterns, out);
    }
    return out;
  }

  [[nodiscard]] std::uint64_t size_in_bytes() const noexcept {
    return bwt_.size_in_bytes() + seed32_.size() * 4 + seed64_.size() * 8;
  }

  void save(std::ostream& out) const {
    io::write_magic(out, kMagic, kVersion);
    io::write_le<std::uint64_t>(out, n_);
    io::write_le<std::uint64_t>(out, sentinel_pos_);
    for (auto c : c_) {
      io::write_le<std::uint64_t>(out, c);
    }
    io::write_le<std::uint32_t>(out, seed32_.empty() ? 64 : 32);
    if (seed32_.empty()) {
      io::write_array<std::uint64_t>(out, seed64_);
    } else {
      io::write_array<std::uint32_t>(out, seed32_);
    }
    bwt_.save(out);
  }

  static FmIndex load(std::istream& in) {
    io::expect_magic(in, kMagic, kVersion);
    FmIndex fm;
    fm.n_ = io::read_le<std::uint64_t>(in);
    fm.sentinel_pos_ = io::read_le<std::uint64_t>(in);
    for (auto& c : fm.c_) {
      c = io::read_le<std::uint64_t>(in);
    }
    auto const width = io::read_le<std::uint32_t>(in);
    if (width == 32) {
      fm.seed32_.resize(2 * kSeedTableSize);
      io::read_array<std::uint32_t>(in, fm.seed32_);
    } else if (width == 64) {
      fm.seed64_.resize(2 * kSeedTableSize);
      io::read_array<std::uint64_t>(in, fm.seed64_);
    } else {
      throw format_error("bad seed table width");
    }
    fm.bwt_ = QuadRank16::load(in);
    if (fm.bwt_.size() != fm.n_ + 1 || fm.sentinel_pos_ > fm.n_ || fm.c_[4] > fm.n_ + 1) {
      throw format_error("FM-index header inconsistent with BWT");
    }
    return fm;
  }

private:
  static constexpr io::Magic kMagic = io::make_magic("QRFMIDX1");
  static constexpr std::uint32_t kVersion = 1;

  struct Start {
    BwtInterval iv;
    std::uint64_t remaining;
  };

  [[nodiscard]] Start start(std::span<std::uint8_t const> pattern, bool use_seed) const noexcept {
    if (use_seed && pattern.size() >= kSeedLen) {
      return {seed_interval(pack_seed(pattern.last(kSeedLen))), pattern.size() - kSeedLen};
    }
    return {full_interval(), pattern.size()};
  }

  void build_seed_table() {
    bool const narrow = n_ + 1 < (std::uint64_t{1} << 32);
    if (narrow) {
      seed32_.assign(2 * kSeedTableSize, 0);
    } else {
      seed64_.assign(2 * kSeedTableSize, 0);
    }
    for (std::uint32_t key = 0; key < kSeedTableSize; ++key) {
      BwtInterval iv = full_interval();
      for (unsigned k = 0; k < kSeedLen && !iv.empty(); ++k) {
        iv = backward_extend(iv, (key >> (2 * k)) & 3);
      }
      if (iv.empty()) {
        iv = {0, 0};
      }
      if (narrow) {
        seed32_[2 * key] = static_cast<std::uint32_t>(iv.lo);
        seed32_[2 * key + 1] = static_cast<std::uint32_t>(iv.hi);
      } else {
        seed64_[2 * key] = iv.lo;
        seed64_[2 * key + 1] = iv.hi;
      }
    }
  }

  QuadRank16 bwt_;
  std::array<std::uint64_t, 5> c_{};
  std::vector<std::uint32_t> seed32_;
  std::vector<std::uint64_t> seed64_;
  std::uint64_t n_ = 0;
  std::uint64_t sentinel_pos_ = 0;
};

} // namespace qrank
