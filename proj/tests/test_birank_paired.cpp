#include "oracle/naive.hpp"
#include "support.hpp"

#include "qrank/birank_paired.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace qrank;

namespace {

constexpr std::uint64_t kB = 496;
constexpr std::uint64_t kSPrime = 256 * kB;

// Superblock offset and block delta evaluated straight from their
// definitions over a rank function.
template <class RankFn>
std::uint64_t expected_offset(RankFn const& rank, std::uint64_t n, std::uint64_t i) {
  return rank(std::min(n, i * kSPrime + kSPrime / 2)) / 2048;
}

template <class RankFn>
std::int64_t expected_delta(RankFn const& rank, std::uint64_t n, std::uint64_t j) {
  std::uint64_t const i = j / 256;
  bool const lower = j % 256 < 128;
  auto const v = static_cast<std::int64_t>(rank(std::min(n, j * kB + 240))) -
                 static_cast<std::int64_t>(2048 * expected_offset(rank, n, i));
  return v + (lower ? static_cast<std::int64_t>(kSPrime / 2 - 240) : 0);
}

} // namespace

TEST(BiRankPaired, BiasConstant) {
  EXPECT_EQ(BiRankPaired::kLowerBias, 63248u);
  EXPECT_EQ(BiRankPaired::kSuperblockBits, kSPrime);
}

TEST(BiRankPaired, AllZerosFields) {
  std::uint64_t const n = 3 * kSPrime + 1000;
  auto const r = BiRankPaired::build(pack_bits(std::vector<bool>(n, false)));
  for (auto s : r.superblocks()) {
    EXPECT_EQ(s, 0u);
  }
  for (std::uint64_t j = 0; j < r.blocks().size(); ++j) {
    ASSERT_EQ(r.delta(j), j % 256 < 128 ? 63248u : 0u) << j;
  }
  for (std::uint64_t q = 0; q <= n; q += 333) {
    ASSERT_EQ(r.rank(q), 0u);
  }
}

TEST(BiRankPaired, AllOnesFirstBlockMatchesFormula) {
  std::uint64_t const n = 2 * kSPrime;
  auto const r = BiRankPaired::build(pack_bits(std::vector<bool>(n, true)));
  auto const rank = [](std::uint64_t q) { return q; };
  EXPECT_EQ(r.superblocks()[0], expected_offset(rank, n, 0));
  EXPECT_EQ(r.superblocks()[0], 31u);
  EXPECT_EQ(static_cast<std::int64_t>(r.delta(0)), expected_delta(rank, n, 0));
  EXPECT_EQ(r.delta(0), 0u);
  for (std::uint64_t q = 0; q <= n; ++q) {
    ASSERT_EQ(r.rank(q), q);
  }
}

TEST(BiRankPaired, FieldsMatchFormulaOnRandomInput) {
  std::uint64_t const n = 20 * kSPrime + 4321;
  for (double p : {0.5, 0.02, 0.99}) {
    auto const text = pack_bits(support::random_bits(static_cast<std::uint64_t>(p * 100), n, p));
    oracle::BitPrefixOracle const oracle(text);
    auto const rank = [&](std::uint64_t q) { return oracle.rank(q); };
    auto const r = BiRankPaired::build(text);
    for (std::uint64_t i = 0; i < r.superblocks().size(); ++i) {
      ASSERT_EQ(r.superblocks()[i], expected_offset(rank, n, i));
    }
    for (std::uint64_t j = 0; j < r.blocks().size(); ++j) {
      std::int64_t const d = expected_delta(rank, n, j);
      ASSERT_GE(d, 0) << j;
      ASSERT_LT(d, 1 << 16) << j;
      ASSERT_EQ(static_cast<std::int64_t>(r.delta(j)), d) << j;
    }
  }
}

TEST(BiRankPaired, MatchesOracleOnAwkwardLengths) {
  for (std::uint64_t n : support::awkward_lengths({kB, kSPrime / 2, kSPrime})) {
    auto const bits = support::random_bits(n + 3, n);
    auto const r = BiRankPaired::build(pack_bits(bits));
    std::uint64_t expect = 0;
    for (std::uint64_t q = 0; q <= n; ++q) {
      ASSERT_EQ(r.rank(q), expect) << n << ' ' << q;
      if (q < n) {
        expect += bits[q];
      }
    }
  }
}

TEST(BiRankPaired, EqualsBaseVariant) {
  std::uint64_t const n = (4u << 20) * 8;
  auto const text = pack_bits(support::random_bits(21, n));
  auto const paired = BiRankPaired::build(text, 2);
  auto const base = BiRank16::build(text);
  for (std::uint64_t q : support::query_set(n, {kB, kSPrime / 2, kSPrime}, 20'000, 1)) {
    ASSERT_EQ(paired.rank(q), base.rank(q)) << q;
  }
}

TEST(BiRankPaired, SmallerSuperblockArrayThanBase) {
  auto const text = pack_bits(support::random_bits(21, 4'000'000));
  auto const paired = BiRankPaired::build(text);
  auto const base = BiRank16::build(text);
  EXPECT_EQ(paired.blocks().size(), base.blocks().size());
  EXPECT_EQ(paired.superblocks().size(), (base.superblocks().size() + 1) / 2);
  EXPECT_LT(paired.overhead(), base.overhead());
}

TEST(BiRankPaired, DeterministicAndSerializable) {
  auto const text = pack_bits(support::random_bits(8, 5 * kSPrime + 17));
  auto const r = BiRankPaired::build(text, 1);
  EXPECT_TRUE(BiRankPaired::build(text, 3) == r);
  std::stringstream s;
  r.save(s);
  EXPECT_TRUE(BiRankPaired::load(s) == r);
  std::stringstream s2;
  BiRank16::build(text).save(s2);
  EXPECT_THROW(BiRankPaired::load(s2), format_error);
}
