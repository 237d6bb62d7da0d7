#pragma once

#include "qrank/bits.hpp"
#include "qrank/io.hpp"

#include <cstdint>
#include <istream>
#include <ostream>
#include <ranges>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qrank {

/// Largest binary text any rank structure here can index (1 TiB).
inline constexpr std::uint64_t kMaxBitTextLen = std::uint64_t{1} << 43;
/// Largest DNA text (8 TiB of 2-bit characters).
inline constexpr std::uint64_t kMaxQuadTextLen = std::uint64_t{1} << 45;

inline void check_bit_capacity(std::uint64_t n) {
  if (n > kMaxBitTextLen) {
    throw capacity_error("binary text of " + std::to_string(n) + " bits exceeds 2^43");
  }
}

inline void check_quad_capacity(std::uint64_t n) {
  if (n > kMaxQuadTextLen) {
    throw capacity_error("quad text of " + std::to_string(n) + " characters exceeds 2^45");
  }
}

/// Immutable packed binary text. Character i is bit i % 64 of word i / 64;
/// bits at positions >= size() are zero.
class BitText {
public:
  BitText() = default;

  /// Takes ownership of packed words; clears any bits past n.
  static BitText from_words(std::vector<std::uint64_t> words, std::uint64_t n) {
    check_bit_capacity(n);
    std::uint64_t const need = (n + 63) / 64;
    if (words.size() < need) {
      throw std::invalid_argument("word array too short for text length");
    }
    words.resize(need);
    if (n % 64 != 0) {
      words.back() &= bit_range(0, static_cast<unsigned>(n % 64));
    }
    BitText t;
    t.words_ = std::move(words);
    t.n_ = n;
    return t;
  }

  [[nodiscard]] std::uint64_t size() const noexcept { return n_; }
  [[nodiscard]] bool empty() const noexcept { return n_ == 0; }
  [[nodiscard]] std::span<std::uint64_t const> words() const noexcept { return words_; }
  [[nodiscard]] std::uint64_t size_in_bytes() const noexcept { return words_.size() * 8; }

  [[nodiscard]] bool operator[](std::uint64_t i) const noexcept {
    QRANK_ASSERT(i < n_);
    return (words_[i >> 6] >> (i & 63)) & 1;
  }

  /// Up to 64 bits starting at character pos; zero past the end.
  [[nodiscard]] std::uint64_t bits(std::uint64_t pos, unsigned len) const noexcept {
    return read_bits(words_, pos, len);
  }

  friend bool operator==(BitText const&, BitText const&) = default;

  void save(std::ostream& out) const {
    io::write_magic(out, kMagic, kVersion);
    io::write_le<std::uint64_t>(out, n_);
    io::write_array<std::uint64_t>(out, words_);
  }

  static BitText load(std::istream& in) {
    io::expect_magic(in, kMagic, kVersion);
    auto const n = io::read_le<std::uint64_t>(in);
    check_bit_capacity(n);
    std::vector<std::uint64_t> words((n + 63) / 64);
    io::read_array<std::uint64_t>(in, words);
    return from_words(std::move(words), n);
  }

private:
  static constexpr io::Magic kMagic = io::make_magic("QRBITTXT");
  static constexpr std::uint32_t kVersion = 1;

  std::vector<std::uint64_t> words_;
  std::uint64_t n_ = 0;
};

/// Immutable packed DNA text: character i occupies bits 2(i % 32)..+1 of
/// word i / 32. Padding past size() is zero.
class QuadText {
public:
  static constexpr unsigned kCharsPerWord = 32;

  QuadText() = default;

  static QuadText from_words(std::vector<std::uint64_t> words, std::uint64_t n) {
    check_quad_capacity(n);
    std::uint64_t const need = (n + kCharsPerWord - 1) / kCharsPerWord;
    if (words.size() < need) {
      throw std::invalid_argument("word array too short for text length");
    }
    words.resize(need);
    if (n % kCharsPerWord != 0) {
      words.back() &= bit_range(0, static_cast<unsigned>(2 * (n % kCharsPerWord)));
    }
    QuadText t;
    t.words_ = std::move(words);
    t.n_ = n;
    return t;
  }

  [[nodiscard]] std::uint64_t size() const noexcept { return n_; }
  [[nodiscard]] bool empty() const noexcept { return n_ == 0; }
  [[nodiscard]] std::span<std::uint64_t const> words() const noexcept { return words_; }
  [[nodiscard]] std::uint64_t size_in_bytes() const noexcept { return words_.size() * 8; }

  [[nodiscard]] std::uint8_t operator[](std::uint64_t i) const noexcept {
    QRANK_ASSERT(i < n_);
    return static_cast<std::uint8_t>((words_[i / kCharsPerWord] >> (2 * (i % kCharsPerWord))) & 3);
  }

  /// 32 packed characters starting at character pos; zero past the end.
  [[nodiscard]] std::uint64_t packed32(std::uint64_t pos) const noexcept {
    return read_bits(words_, 2 * pos, 64);
  }

  friend bool operator==(QuadText const&, QuadText const&) = default;

  void save(std::ostream& out) const {
    io::write_magic(out, kMagic, kVersion);
    io::write_le<std::uint64_t>(out, n_);
    io::write_array<std::uint64_t>(out, words_);
  }

  static QuadText load(std::istream& in) {
    io::expect_magic(in, kMagic, kVersion);
    auto const n = io::read_le<std::uint64_t>(in);
    check_quad_capacity(n);
    std::vector<std::uint64_t> words((n + kCharsPerWord - 1) / kCharsPerWord);
    io::read_array<std::uint64_t>(in, words);
    return from_words(std::move(words), n);
  }

private:
  static constexpr io::Magic kMagic = io::make_magic("QRQUADTX");
  static constexpr std::uint32_t kVersion = 1;

  std::vector<std::uint64_t> words_;
  std::uint64_t n_ = 0;
};

/// Packs a sized range of booleans (or anything convertible to bool).
template <std::ranges::sized_range R>
BitText pack_bits(R const& raw) {
  auto const n = static_cast<std::uint64_t>(std::ranges::size(raw));
  check_bit_capacity(n);
  std::vector<std::uint64_t> words((n + 63) / 64, 0);
  std::uint64_t i = 0;
  for (auto&& b : raw) {
    if (static_cast<bool>(b)) {
      words[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
    ++i;
  }
  return BitText::from_words(std::move(words), n);
}

/// Packs symbols 0..3; anything else is an encoding_error.
template <std::ranges::sized_range R>
QuadText pack_quad(R const& raw) {
  auto const n = static_cast<std::uint64_t>(std::ranges::size(raw));
  check_quad_capacity(n);
  std::vector<std::uint64_t> words((n + 31) / 32, 0);
  std::uint64_t i = 0;
  for (auto&& s : raw) {
    auto const v = static_cast<std::uint64_t>(s);
    if (v > 3) {
      throw encoding_error("symbol " + std::to_string(v) + " at position " + std::to_string(i) +
                           " is outside 0..3");
    }
    words[i / 32] |= v << (2 * (i % 32));
    ++i;
  }
  return QuadText::from_words(std::move(words), n);
}

inline std::vector<bool> unpack_bits(BitText const& text) {
  std::vector<bool> out(text.size());
  for (std::uint64_t i = 0; i < text.size(); ++i) {
    out[i] = text[i];
  }
  return out;
}

inline std::vector<std::uint8_t> unpack_quad(QuadText const& text) {
  std::vector<std::uint8_t> out(text.size());
  for (std::uint64_t i = 0; i < text.size(); ++i) {
    out[i] = text[i];
  }
  return out;
}

} // namespace qrank
