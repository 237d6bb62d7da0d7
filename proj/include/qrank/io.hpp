#pragma once

#include "qrank/bits.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

// Little-endian binary stream helpers shared by all persisted types.
namespace qrank::io {

using Magic = std::array<char, 8>;

constexpr Magic make_magic(std::string_view s) {
  Magic m{};
  for (std::size_t i = 0; i < m.size() && i < s.size(); ++i) {
    m[i] = s[i];
  }
  return m;
}

template <class T>
  requires std::is_unsigned_v<T>
void write_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> buf{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  out.write(buf.data(), buf.size());
}

template <class T>
  requires std::is_unsigned_v<T>
T read_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> buf{};
  if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) {
    throw format_error("unexpected end of stream");
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(buf[i]) << (8 * i);
  }
  return value;
}

template <class T>
  requires std::is_unsigned_v<T>
void write_array(std::ostream& out, std::span<T const> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<char const*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (T v : values) {
      write_le(out, v);
    }
  }
}

template <class T>
  requires std::is_unsigned_v<T>
void read_array(std::istream& in, std::span<T> values) {
  if constexpr (std::endian::native == std::endian::little) {
    if (!in.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(values.size_bytes()))) {
      throw format_error("unexpected end of stream");
    }
  } else {
    for (T& v : values) {
      v = read_le<T>(in);
    }
  }
}

inline void write_lines(std::ostream& out, LineVector const& lines) {
  for (auto const& line : lines) {
    write_array<std::uint64_t>(out, line.words);
  }
}

inline void read_lines(std::istream& in, LineVector& lines) {
  for (auto& line : lines) {
    read_array<std::uint64_t>(in, line.words);
  }
}

inline void write_magic(std::ostream& out, Magic const& m, std::uint32_t version) {
  out.write(m.data(), m.size());
  write_le<std::uint32_t>(out, version);
}

inline void expect_magic(std::istream& in, Magic const& m, std::uint32_t version) {
  Magic got{};
  if (!in.read(got.data(), got.size()) || got != m) {
    throw format_error("bad magic: not a " + std::string(m.data(), m.size()) + " stream");
  }
  auto const v = read_le<std::uint32_t>(in);
  if (v != version) {
    throw format_error("unsupported format version " + std::to_string(v));
  }
}

// Guards allocations driven by untrusted length fields.
inline std::uint64_t checked_count(std::uint64_t count, std::uint64_t limit) {
  if (count > limit) {
    throw format_error("length field out of range");
  }
  return count;
}

} // namespace qrank::io
