#include <gtest/gtest.h>

#include <random>

#include "pipesim/memory.hpp"

using namespace pipesim;

namespace {

CacheConfig cache(std::uint32_t lines, std::uint32_t line_bytes, std::uint32_t penalty) {
  CacheConfig c;
  c.enabled = true;
  c.num_lines = lines;
  c.line_bytes = line_bytes;
  c.miss_penalty = penalty;
  return c;
}

}  // namespace

TEST(DataMemory, DisabledCacheReadsInOneCycle) {
  SparseMemory m;
  m.write32(0x100, 0xdeadbeef);
  DataMemory d(m, CacheConfig{});
  const auto r = d.access(0x100, 4, AccessKind::Read);
  EXPECT_EQ(r.value, 0xdeadbeefu);
  EXPECT_EQ(r.latency, 1u);
}

TEST(DataMemory, ColdMissThenHit) {
  SparseMemory m;
  DataMemory d(m, cache(64, 16, 10));
  EXPECT_EQ(d.access(0x100, 4, AccessKind::Read).latency, 11u);
  EXPECT_EQ(d.access(0x100, 4, AccessKind::Read).latency, 1u);
  EXPECT_EQ(d.access(0x104, 4, AccessKind::Read).latency, 1u);  // same line
  EXPECT_EQ(d.misses(), 1u);
  EXPECT_EQ(d.hits(), 2u);
}

TEST(DataMemory, SingleLineConflictAlwaysMisses) {
  SparseMemory m;
  DataMemory d(m, cache(1, 16, 3));
  for (int i = 0; i < 10; ++i) {
    EXPECT_FALSE(d.access(0x000, 4, AccessKind::Read).hit);
    EXPECT_FALSE(d.access(0x100, 4, AccessKind::Read).hit);
  }
}

TEST(DataMemory, WritesAllocate) {
  SparseMemory m;
  DataMemory d(m, cache(4, 16, 5));
  EXPECT_EQ(d.access(0x40, 1, AccessKind::Write, 0xab).latency, 6u);
  const auto r = d.access(0x40, 1, AccessKind::Read);
  EXPECT_TRUE(r.hit);
  EXPECT_EQ(r.value, 0xabu);
  EXPECT_EQ(m.read8(0x40), 0xab);  // write-through
}

TEST(DataMemory, RejectsBadInputs) {
  SparseMemory m;
  DataMemory d(m, CacheConfig{});
  EXPECT_THROW(d.access(0x2, 4, AccessKind::Read), std::invalid_argument);
  EXPECT_THROW(d.access(0x0, 3, AccessKind::Read), std::invalid_argument);
  EXPECT_THROW((void)DataMemory(m, cache(3, 16, 1)), std::invalid_argument);
  EXPECT_THROW((void)DataMemory(m, cache(4, 2, 1)), std::invalid_argument);
  EXPECT_THROW((void)DataMemory(m, cache(4, 16, 0)), std::invalid_argument);
}

// Hit/miss checked against a history scan: an access hits iff the latest
// earlier access to the same set touched the same block.
TEST(DataMemory, MatchesBruteForceModelOnRandomTrace) {
  for (const auto& geometry : {std::pair{1u, 4u}, std::pair{4u, 16u}, std::pair{8u, 32u}, std::pair{64u, 16u}}) {
    const auto [lines, bytes] = geometry;
    SparseMemory backing;
    SparseMemory reference;
    DataMemory cached(backing, cache(lines, bytes, 7));
    DataMemory plain(reference, CacheConfig{});
    std::mt19937_64 rng(lines * 1000 + bytes);
    std::vector<Address> history;
    for (int i = 0; i < 3000; ++i) {
      const unsigned width = 1u << (rng() % 3);
      const Address addr = static_cast<Address>(rng() % 1024) & ~(width - 1);
      const auto kind = rng() % 3 == 0 ? AccessKind::Write : AccessKind::Read;
      const Word data = static_cast<Word>(rng());

      const Address block = addr / bytes;
      bool expect_hit = false;
      for (auto it = history.rbegin(); it != history.rend(); ++it) {
        if (*it % lines == block % lines) {
          expect_hit = *it == block;
          break;
        }
      }
      history.push_back(block);

      const auto got = cached.access(addr, width, kind, data);
      const auto want = plain.access(addr, width, kind, data);
      ASSERT_EQ(got.hit, expect_hit) << "access " << i;
      ASSERT_EQ(got.latency, expect_hit ? 1u : 8u);
      ASSERT_EQ(got.value, want.value);
    }
    EXPECT_EQ(backing, reference);
  }
}
