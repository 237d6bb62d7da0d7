#pragma once

#include "qrank/text.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace qrank {

/// Suffix array of text + '$' (length n + 1) by prefix doubling with radix
/// sorted rank pairs, O(n log n). The sentinel sorts before every symbol, so
/// entry 0 is always n.
inline std::vector<std::uint64_t> build_suffix_array(QuadText const& text) {
  std::uint64_t const len = text.size() + 1;
  std::vector<std::uint64_t> sa(len);
  std::vector<std::uint64_t> rank(len);
  std::vector<std::uint64_t> tmp(len);
  std::vector<std::uint64_t> bucket;

  // ranks: '$' = 0, symbol c = c + 1
  for (std::uint64_t i = 0; i < text.size(); ++i) {
    rank[i] = std::uint64_t{text[i]} + 1;
  }
  rank[len - 1] = 0;

  auto counting_sort = [&](std::vector<std::uint64_t> const& order, std::uint64_t classes) {
    bucket.assign(classes + 1, 0);
    for (std::uint64_t i : order) {
      ++bucket[rank[i] + 1];
    }
    for (std::uint64_t c = 1; c <= classes; ++c) {
      bucket[c] += bucket[c - 1];
    }
    for (std::uint64_t i : order) {
      sa[bucket[rank[i]]++] = i;
    }
  };

  for (std::uint64_t i = 0; i < len; ++i) {
    tmp[i] = i;
  }
  std::uint64_t classes = 5;
  counting_sort(tmp, classes);

  for (std::uint64_t k = 1;; k <<= 1) {
    // Order by second key rank[i + k]; suffixes with i + k past the end
    // already contain the unique sentinel in their first k characters.
    std::uint64_t t = 0;
    for (std::uint64_t i = len - std::min(k, len); i < len; ++i) {
      tmp[t++] = i;
    }
    for (std::uint64_t i = 0; i < len; ++i) {
      if (sa[i] >= k) {
        tmp[t++] = sa[i] - k;
      }
    }
    counting_sort(tmp, classes);

    tmp[sa[0]] = 0;
    std::uint64_t cls = 0;
    for (std::uint64_t i = 1; i < len; ++i) {
      std::uint64_t const a = sa[i - 1];
      std::uint64_t const b = sa[i];
      std::uint64_t const a2 = a + k < len ? rank[a + k] : 0;
      std::uint64_t const b2 = b + k < len ? rank[b + k] : 0;
      if (rank[a] != rank[b] || a + k >= len || b + k >= len || a2 != b2) {
        ++cls;
      }
      tmp[b] = cls;
    }
    rank.swap(tmp);
    classes = cls + 1;
    if (classes == len) {
      break;
    }
  }
  return sa;
}

} // namespace qrank
