#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qrank::dna {

/// A=0, C=1, G=2, T=3; lowercase accepted; anything else yields nullopt.
constexpr std::optional<std::uint8_t> encode_base(char ch) noexcept {
  switch (ch) {
  case 'A': case 'a': return 0;
  case 'C': case 'c': return 1;
  case 'G': case 'g': return 2;
  case 'T': case 't': return 3;
  default: return std::nullopt;
  }
}

constexpr char decode_base(std::uint8_t s) noexcept { return "ACGT"[s & 3]; }

/// Encodes a whole sequence; nullopt if any character is not ACGT.
inline std::optional<std::vector<std::uint8_t>> encode(std::string_view seq) {
  std::vector<std::uint8_t> out;
  out.reserve(seq.size());
  for (char ch : seq) {
    auto const s = encode_base(ch);
    if (!s) {
      return std::nullopt;
    }
    out.push_back(*s);
  }
  return out;
}

inline std::string decode(std::span<std::uint8_t const> symbols) {
  std::string out;
  out.reserve(symbols.size());
  for (auto s : symbols) {
    out.push_back(decode_base(s));
  }
  return out;
}

/// A<->T, C<->G, reversed.
inline std::vector<std::uint8_t> reverse_complement(std::span<std::uint8_t const> pattern) {
  std::vector<std::uint8_t> out(pattern.rbegin(), pattern.rend());
  for (auto& s : out) {
    s = static_cast<std::uint8_t>(3 - s);
  }
  return out;
}

struct Record {
  std::string name;
  std::string sequence;
};

/// Reads FASTA records, or one sequence per line when the input does not
/// start with '>'. Blank lines and trailing '\r' are ignored.
inline std::vector<Record> read_records(std::istream& in) {
  std::vector<Record> records;
  std::string line;
  bool fasta = false;
  bool first = true;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (first) {
      fasta = line.front() == '>';
      first = false;
    }
    if (fasta) {
      if (line.front() == '>') {
        records.push_back({line.substr(1), {}});
      } else {
        records.back().sequence += line;
      }
    } else {
      records.push_back({std::to_string(line_no), line});
    }
  }
  return records;
}

} // namespace qrank::dna
