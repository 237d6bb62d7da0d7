#pragma once

// Reference implementations by direct scanning. Tests compare every
// optimized path against these, never against each other.

#include "qrank/text.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace oracle {

inline std::uint64_t naive_rank(qrank::BitText const& text, std::uint64_t q) {
  std::uint64_t r = 0;
  for (std::uint64_t i = 0; i < q; ++i) {
    r += text[i] ? 1 : 0;
  }
  return r;
}

inline std::uint64_t naive_rank(std::vector<bool> const& bits, std::uint64_t q) {
  return static_cast<std::uint64_t>(std::count(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(q), true));
}

inline std::uint64_t naive_rank_c(qrank::QuadText const& text, std::uint64_t q, unsigned c) {
  std::uint64_t r = 0;
  for (std::uint64_t i = 0; i < q; ++i) {
    r += text[i] == c ? 1 : 0;
  }
  return r;
}

inline std::uint64_t naive_rank_c(std::span<std::uint8_t const> symbols, std::uint64_t q, unsigned c) {
  return static_cast<std::uint64_t>(std::count(symbols.begin(), symbols.begin() + static_cast<std::ptrdiff_t>(q), c));
}

/// naive_rank with stored counts every 64 characters, for large inputs.
/// Checkpoints come from one character-by-character pass; a query adds the
/// characters after its checkpoint one at a time.
class BitPrefixOracle {
public:
  static constexpr std::uint64_t kStep = 64;

  explicit BitPrefixOracle(qrank::BitText const& text) : text_(&text) {
    checkpoints_.reserve(text.size() / kStep + 1);
    std::uint64_t r = 0;
    for (std::uint64_t i = 0; i < text.size(); ++i) {
      if (i % kStep == 0) {
        checkpoints_.push_back(r);
      }
      r += text[i] ? 1 : 0;
    }
    if (text.size() % kStep == 0) {
      checkpoints_.push_back(r);
    }
    total_ = r;
  }

  [[nodiscard]] std::uint64_t rank(std::uint64_t q) const {
    std::uint64_t r = checkpoints_[q / kStep];
    for (std::uint64_t i = q - q % kStep; i < q; ++i) {
      r += (*text_)[i] ? 1 : 0;
    }
    return r;
  }

  [[nodiscard]] std::uint64_t total() const noexcept { return total_; }

private:
  qrank::BitText const* text_;
  std::vector<std::uint64_t> checkpoints_;
  std::uint64_t total_ = 0;
};

class QuadPrefixOracle {
public:
  static constexpr std::uint64_t kStep = 64;

  explicit QuadPrefixOracle(qrank::QuadText const& text) : text_(&text) {
    checkpoints_.reserve(text.size() / kStep + 1);
    std::array<std::uint64_t, 4> r{};
    for (std::uint64_t i = 0; i < text.size(); ++i) {
      if (i % kStep == 0) {
        checkpoints_.push_back(r);
      }
      ++r[text[i]];
    }
    if (text.size() % kStep == 0) {
      checkpoints_.push_back(r);
    }
  }

  [[nodiscard]] std::uint64_t rank(std::uint64_t q, unsigned c) const { return rank4(q)[c]; }

  [[nodiscard]] std::array<std::uint64_t, 4> rank4(std::uint64_t q) const {
    std::array<std::uint64_t, 4> r = checkpoints_[q / kStep];
    for (std::uint64_t i = q - q % kStep; i < q; ++i) {
      ++r[(*text_)[i]];
    }
    return r;
  }

private:
  qrank::QuadText const* text_;
  std::vector<std::array<std::uint64_t, 4>> checkpoints_;
};

/// Occurrences of pattern in text, overlapping ones included.
inline std::uint64_t naive_count_occurrences(std::span<std::uint8_t const> text, std::span<std::uint8_t const> pattern) {
  if (pattern.empty() || pattern.size() > text.size()) {
    return pattern.empty() ? text.size() + 1 : 0;
  }
  std::uint64_t count = 0;
  for (std::size_t i = 0; i + pattern.size() <= text.size(); ++i) {
    if (std::equal(pattern.begin(), pattern.end(), text.begin() + static_cast<std::ptrdiff_t>(i))) {
      ++count;
    }
  }
  return count;
}

/// Suffix array of text + '$' by comparison sort; a suffix that is a proper
/// prefix of another sorts first, which is exactly the sentinel order.
inline std::vector<std::uint64_t> naive_suffix_array(std::span<std::uint8_t const> text) {
  std::vector<std::uint64_t> sa(text.size() + 1);
  std::iota(sa.begin(), sa.end(), 0);
  std::sort(sa.begin(), sa.end(), [&](std::uint64_t a, std::uint64_t b) {
    return std::lexicographical_compare(text.begin() + static_cast<std::ptrdiff_t>(a), text.end(),
                                        text.begin() + static_cast<std::ptrdiff_t>(b), text.end());
  });
  return sa;
}

/// BWT from a suffix array; the sentinel is returned as 4.
inline std::vector<std::uint8_t> naive_bwt(std::span<std::uint8_t const> text, std::vector<std::uint64_t> const& sa) {
  std::vector<std::uint8_t> bwt(sa.size());
  for (std::size_t i = 0; i < sa.size(); ++i) {
    bwt[i] = sa[i] == 0 ? 4 : text[sa[i] - 1];
  }
  return bwt;
}

} // namespace oracle
