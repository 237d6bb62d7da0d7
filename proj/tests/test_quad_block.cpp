#include "oracle/naive.hpp"
#include "support.hpp"

#include "qrank/quad_block.hpp"

#include <gtest/gtest.h>

using namespace qrank;

namespace {

using Block = std::array<std::uint8_t, kQuadBlockChars>;

Block filled(std::uint8_t s) {
  Block b;
  b.fill(s);
  return b;
}

bool bit(std::uint64_t w, unsigned i) { return (w >> i) & 1; }

// Plane words and bit position of block character p (slot 32 + p).
std::pair<unsigned, unsigned> locate(unsigned p) {
  unsigned const slot = kQuadDeltaChars + p;
  return {2 * (slot / 64), slot % 64};
}

} // namespace

TEST(EncodeQuadBlock, AllTwosSetLowPlaneClearHighPlane) {
  CacheLine const line = encode_quad_block(filled(2), {0, 0, 0, 0});
  for (unsigned p = 0; p < kQuadBlockChars; ++p) {
    auto const [w, b] = locate(p);
    EXPECT_TRUE(bit(line.words[w], b)) << p;
    EXPECT_FALSE(bit(line.words[w + 1], b)) << p;
  }
}

TEST(EncodeQuadBlock, AllZerosSetBothPlanes) {
  CacheLine const line = encode_quad_block(filled(0), {0, 0, 0, 0});
  for (unsigned p = 0; p < kQuadBlockChars; ++p) {
    auto const [w, b] = locate(p);
    EXPECT_TRUE(bit(line.words[w], b));
    EXPECT_TRUE(bit(line.words[w + 1], b));
  }
}

TEST(EncodeQuadBlock, PlanesAreNegatedCharacterBits) {
  auto const sym = support::random_symbols(17, kQuadBlockChars);
  Block chars;
  std::copy(sym.begin(), sym.end(), chars.begin());
  CacheLine const line = encode_quad_block(chars, {1, 2, 3, 4});
  for (unsigned p = 0; p < kQuadBlockChars; ++p) {
    auto const [w, b] = locate(p);
    EXPECT_EQ(bit(line.words[w], b), !(sym[p] & 1)) << p;
    EXPECT_EQ(bit(line.words[w + 1], b), !(sym[p] & 2)) << p;
  }
}

TEST(EncodeQuadBlock, PlanePredicateMatchesSymbolEquality) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto const sym = support::random_symbols(seed, kQuadBlockChars);
    Block chars;
    std::copy(sym.begin(), sym.end(), chars.begin());
    CacheLine const line = encode_quad_block(chars, {0, 0, 0, 0});
    for (unsigned c = 0; c < 4; ++c) {
      for (unsigned p = 0; p < kQuadBlockChars; ++p) {
        auto const [w, b] = locate(p);
        ASSERT_EQ(bit(match_word(line.words[w], line.words[w + 1], c), b), sym[p] == c);
      }
      std::uint64_t const naive = oracle::naive_rank_c(sym, sym.size(), c);
      ASSERT_EQ(count_in_slots(line, c, kQuadDeltaChars, 256), naive) << seed << ' ' << c;
    }
  }
}

TEST(EncodeQuadBlock, DeltaSlots) {
  CacheLine const line = encode_quad_block(filled(3), {0x1111, 0x2222, 0x3333, 0x4444});
  // 16-bit lanes 0, 1, 4, 5 of the line
  auto lane = [&](unsigned k) { return (line.words[k / 4] >> (16 * (k % 4))) & 0xFFFF; };
  EXPECT_EQ(lane(0), 0x1111u);
  EXPECT_EQ(lane(1), 0x2222u);
  EXPECT_EQ(lane(4), 0x3333u);
  EXPECT_EQ(lane(5), 0x4444u);
  for (unsigned c = 0; c < 4; ++c) {
    EXPECT_EQ(load_quad16_delta(line, c), 0x1111u * (c + 1));
  }
}

TEST(EncodeQuadBlock, CharactersSplitAcrossHalves) {
  // characters 0..95 in half 0 after the delta region, 96..223 in half 1
  Block chars = filled(0);
  chars[95] = 3;
  chars[96] = 3;
  CacheLine const line = encode_quad_block(chars, {0, 0, 0, 0});
  EXPECT_FALSE(bit(line.words[2], 63));
  EXPECT_FALSE(bit(line.words[3], 63));
  EXPECT_FALSE(bit(line.words[4], 0));
  EXPECT_FALSE(bit(line.words[5], 0));
  EXPECT_EQ(count_in_slots(line, 3, 32, 128), 1u);
  EXPECT_EQ(count_in_slots(line, 3, 128, 256), 1u);
}

TEST(EncodeQuadPlanes, PastTheEndReadsAsSymbolZero) {
  auto const text = pack_quad(std::vector<std::uint8_t>(10, 3));
  CacheLine line;
  encode_quad_planes(line, text, 0, kQuadDeltaChars);
  EXPECT_EQ(count_in_slots(line, 3, 32, 256), 10u);
  EXPECT_EQ(count_in_slots(line, 0, 32, 256), 214u);
}
