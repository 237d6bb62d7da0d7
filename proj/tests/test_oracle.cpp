#include "oracle/naive.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <set>

using namespace oracle;

TEST(NaiveRank, ZeroPrefixIsZero) {
  auto const bits = support::random_bits(1, 1000);
  EXPECT_EQ(naive_rank(bits, 0), 0u);
  EXPECT_EQ(naive_rank(qrank::pack_bits(bits), 0), 0u);
}

TEST(NaiveRank, AllOnesCountsPositions) {
  std::vector<bool> const bits(777, true);
  auto const text = qrank::pack_bits(bits);
  for (std::uint64_t q = 0; q <= bits.size(); q += 37) {
    EXPECT_EQ(naive_rank(bits, q), q);
    EXPECT_EQ(naive_rank(text, q), q);
  }
}

TEST(NaiveRank, ReversalIdentity) {
  auto const bits = support::random_bits(5, 3000);
  std::vector<bool> const rev(bits.rbegin(), bits.rend());
  std::uint64_t const total = naive_rank(bits, bits.size());
  for (std::uint64_t q = 0; q <= bits.size(); q += 13) {
    EXPECT_EQ(naive_rank(rev, bits.size() - q), total - naive_rank(bits, q));
  }
}

TEST(NaiveRank, QuadSymbolsPartitionPrefix) {
  auto const sym = support::random_symbols(9, 2000);
  auto const text = qrank::pack_quad(sym);
  for (std::uint64_t q = 0; q <= sym.size(); q += 41) {
    std::uint64_t sum = 0;
    for (unsigned c = 0; c < 4; ++c) {
      EXPECT_EQ(naive_rank_c(text, q, c), naive_rank_c(sym, q, c));
      sum += naive_rank_c(sym, q, c);
    }
    EXPECT_EQ(sum, q);
  }
}

TEST(PrefixOracle, MatchesLinearScan) {
  for (std::uint64_t n : {0u, 1u, 63u, 64u, 65u, 1000u, 4096u}) {
    auto const bits = support::random_bits(n, n);
    auto const text = qrank::pack_bits(bits);
    BitPrefixOracle const po(text);
    auto const sym = support::random_symbols(n + 1, n);
    auto const qtext = qrank::pack_quad(sym);
    QuadPrefixOracle const qo(qtext);
    for (std::uint64_t q = 0; q <= n; ++q) {
      ASSERT_EQ(po.rank(q), naive_rank(bits, q)) << n << ' ' << q;
      for (unsigned c = 0; c < 4; ++c) {
        ASSERT_EQ(qo.rank(q, c), naive_rank_c(sym, q, c)) << n << ' ' << q << ' ' << c;
      }
    }
  }
}

TEST(NaiveCount, PatternEqualToTextOccursOnce) {
  std::vector<std::uint8_t> const t{0, 1, 2, 3, 0, 2};
  EXPECT_EQ(naive_count_occurrences(t, t), 1u);
}

TEST(NaiveCount, OverlappingOccurrencesCount) {
  std::vector<std::uint8_t> const t{0, 0, 0};
  std::vector<std::uint8_t> const p{0, 0};
  EXPECT_EQ(naive_count_occurrences(t, p), 2u);
}

TEST(NaiveCount, LongerPatternNeverOccurs) {
  std::vector<std::uint8_t> const t{1, 2};
  std::vector<std::uint8_t> const p{1, 2, 3};
  EXPECT_EQ(naive_count_occurrences(t, p), 0u);
}

TEST(NaiveSuffixArray, StrictlyIncreasingText) {
  std::vector<std::uint8_t> const t{0, 1, 2, 3};
  EXPECT_EQ(naive_suffix_array(t), (std::vector<std::uint64_t>{4, 0, 1, 2, 3}));
}

TEST(NaiveSuffixArray, IsAPermutationInSortedOrder) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto const t = support::skewed_symbols(seed, 300, {5, 1, 1, 1});
    auto const sa = naive_suffix_array(t);
    std::set<std::uint64_t> const seen(sa.begin(), sa.end());
    ASSERT_EQ(seen.size(), t.size() + 1);
    ASSERT_EQ(*seen.rbegin(), t.size());
    ASSERT_EQ(sa[0], t.size());
    for (std::size_t i = 1; i < sa.size(); ++i) {
      ASSERT_TRUE(std::lexicographical_compare(t.begin() + static_cast<std::ptrdiff_t>(sa[i - 1]), t.end(),
                                               t.begin() + static_cast<std::ptrdiff_t>(sa[i]), t.end()));
    }
  }
}
