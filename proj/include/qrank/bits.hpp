#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#ifndef QRANK_ASSERT
#  define QRANK_ASSERT(cond) assert(cond)
#endif

namespace qrank {

inline constexpr std::size_t kCacheLineBytes = 64;

// Thrown when an input exceeds the addressing limit of a structure.
class capacity_error : public std::length_error {
public:
  using std::length_error::length_error;
};

// Thrown for symbols outside the alphabet.
class encoding_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a serialized stream is malformed or of the wrong kind.
class format_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class alignment_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One 512-bit cache line, the unit every rank query touches.
struct alignas(kCacheLineBytes) CacheLine {
  std::array<std::uint64_t, 8> words{};

  friend bool operator==(CacheLine const&, CacheLine const&) = default;
};
static_assert(sizeof(CacheLine) == kCacheLineBytes);
static_assert(alignof(CacheLine) == kCacheLineBytes);

using LineVector = std::vector<CacheLine>;

inline void require_line_aligned(LineVector const& lines) {
  auto const addr = reinterpret_cast<std::uintptr_t>(lines.data());
  if (addr % kCacheLineBytes != 0) {
    throw alignment_error("block array is not 64-byte aligned");
  }
}

/// Prefetch into all cache levels. Never changes program state.
inline void prefetch_read(void const* addr) noexcept {
#if defined(__GNUC__) || defined(__clang__)
  __builtin_prefetch(addr, 0, 3);
#else
  (void)addr;
#endif
}

/// Bits [pos, pos + len) of a little-endian word array, len <= 64.
/// Positions past the end read as zero.
inline std::uint64_t read_bits(std::span<std::uint64_t const> words,
                               std::uint64_t pos, unsigned len) noexcept {
  if (len == 0) {
    return 0;
  }
  std::uint64_t const wi = pos >> 6;
  unsigned const off = static_cast<unsigned>(pos & 63);
  std::uint64_t v = wi < words.size() ? words[wi] >> off : 0;
  if (off != 0 && wi + 1 < words.size()) {
    v |= words[wi + 1] << (64 - off);
  }
  return len == 64 ? v : v & ((std::uint64_t{1} << len) - 1);
}

/// Mask with bits [lo, hi) set, 0 <= lo <= hi <= 64.
constexpr std::uint64_t bit_range(unsigned lo, unsigned hi) noexcept {
  if (lo >= hi) {
    return 0;
  }
  std::uint64_t const upper = hi == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << hi) - 1;
  return upper & (~std::uint64_t{0} << lo);
}

/// Gathers the even bits (low bits of 2-bit characters) into the low half.
constexpr std::uint32_t gather_even_bits(std::uint64_t x) noexcept {
  x &= 0x5555555555555555ull;
  x = (x | (x >> 1)) & 0x3333333333333333ull;
  x = (x | (x >> 2)) & 0x0F0F0F0F0F0F0F0Full;
  x = (x | (x >> 4)) & 0x00FF00FF00FF00FFull;
  x = (x | (x >> 8)) & 0x0000FFFF0000FFFFull;
  x = (x | (x >> 16)) & 0x00000000FFFFFFFFull;
  return static_cast<std::uint32_t>(x);
}

/// Conditional negation without a branch: returns -v if negate else v.
constexpr std::uint64_t negate_if(std::uint64_t v, bool negate) noexcept {
  std::uint64_t const m = std::uint64_t{0} - static_cast<std::uint64_t>(negate);
  return (v ^ m) - m;
}

/// Runs fn(begin, end) over contiguous chunks of [0, count) on up to
/// `threads` workers. Chunk boundaries depend only on count and threads.
template <class Fn>
void parallel_chunks(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, threads);
  std::size_t const workers = std::min<std::size_t>(threads, std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::size_t const chunk = (count + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t const begin = std::min(count, w * chunk);
    std::size_t const end = std::min(count, begin + chunk);
    if (begin == end) {
      break;
    }
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

} // namespace qrank
