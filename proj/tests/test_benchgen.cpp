#include <gtest/gtest.h>

#include "pipesim/pipesim.hpp"

using namespace pipesim;

TEST(RandomProgram, Deterministic) {
  EXPECT_EQ(benchgen::gen_random_program(1, 10), benchgen::gen_random_program(1, 10));
  EXPECT_NE(benchgen::gen_random_program(1, 10), benchgen::gen_random_program(2, 10));
}

TEST(RandomProgram, HaltsWithinBoundAndStaysInDataRegion) {
  const benchgen::RandomProgramOptions opts;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const std::uint32_t length = 1 + seed % 40;
    const auto image = assemble(benchgen::gen_random_program(seed, length, opts));
    const auto s = golden::run(image, benchgen::random_program_step_bound(length, opts));
    ASSERT_TRUE(s.halted) << seed;
    // Only the data region may differ from the loaded image.
    const auto initial = make_initial_state(image);
    for (const auto& [addr, byte] : s.mem.written()) {
      if (addr >= opts.data_base && addr < opts.data_base + opts.data_bytes) continue;
      ASSERT_EQ(byte, initial.mem.read8(addr)) << "seed " << seed << " addr " << addr;
    }
  }
}

TEST(RandomProgram, RejectsZeroLength) { EXPECT_THROW(benchgen::gen_random_program(1, 0), std::invalid_argument); }

TEST(LoadUseBench, AdjacencyCountMatchesMeasuredEvents) {
  for (std::uint32_t pairs = 0; pairs <= 4; ++pairs) {
    for (const std::uint32_t filler : {0u, 3u, 9u}) {
      const auto bench = benchgen::gen_loaduse_bench(37, benchgen::LoadUseLayout{pairs, filler});
      const auto image = assemble(bench.source);
      const auto stall = run(image, SchemeId::STALL);
      const auto ssr = run(image, SchemeId::SSR);
      EXPECT_EQ(stall.load_use_events, bench.expected_adjacencies);
      EXPECT_EQ(stall.bubbles.load_use_stall_cycles, bench.expected_adjacencies);
      EXPECT_EQ(stall.cycles - ssr.cycles, bench.expected_adjacencies);
      EXPECT_EQ(stall.retired, 2 + 37ull * bench.layout.instructions_per_iteration() + 1);
    }
  }
}

TEST(LoadUseBench, NoAdjacencyMeansEqualCycles) {
  const auto bench = benchgen::gen_loaduse_bench(50, benchgen::LoadUseLayout{0, 12});
  const auto image = assemble(bench.source);
  EXPECT_EQ(run(image, SchemeId::STALL).cycles, run(image, SchemeId::SSR).cycles);
  EXPECT_EQ(bench.expected_adjacencies, 0u);
}

TEST(LoadUseBench, DensityLayout) {
  const auto l = benchgen::layout_for_density(0.1);
  EXPECT_DOUBLE_EQ(l.density(), 0.1);
  EXPECT_EQ(benchgen::layout_for_density(1.0 / 7.0).adjacent_pairs, 1u);
  EXPECT_THROW(benchgen::layout_for_density(0.0), std::invalid_argument);
  EXPECT_THROW(benchgen::layout_for_density(1.5), std::invalid_argument);
  EXPECT_THROW(benchgen::gen_loaduse_bench(0, 0.1), std::invalid_argument);
}

TEST(LoadUseBench, LargeIterationCountsUseUpperImmediate) {
  const auto bench = benchgen::gen_loaduse_bench(5000, benchgen::LoadUseLayout{1, 0});
  const auto s = golden::run(assemble(bench.source), 100'000);
  EXPECT_TRUE(s.halted);
  EXPECT_EQ(s.regs[30], 0u);
  EXPECT_EQ(s.retired, 3 + 5000ull * 7 + 1);
}
