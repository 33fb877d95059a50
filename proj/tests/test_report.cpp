#include <gtest/gtest.h>

#include <random>

#include "pipesim/report.hpp"

using namespace pipesim;

namespace {

RunReport report(SchemeId s, std::uint64_t cycles, std::uint64_t retired = 100, std::uint64_t digest = 0xabc) {
  RunReport r;
  r.scheme = s;
  r.cycles = cycles;
  r.retired = retired;
  r.cpi = compute_cpi(cycles, retired);
  r.final_state_digest = digest;
  r.halted_cleanly = true;
  return r;
}

}  // namespace

TEST(Compare, LargeClockCountsOneDecimal) {
  const auto c = compare(report(SchemeId::STALL, 247888), report(SchemeId::SSR, 231862));
  EXPECT_EQ(format_pct(c.speedup_pct, 1), "+6.9%");
  EXPECT_NEAR(c.speedup_pct, 6.9119, 1e-3);
  EXPECT_NEAR(c.reduction_pct, 6.4650, 1e-3);
  EXPECT_TRUE(c.states_match);
}

TEST(Compare, MicroLoadUsePair) {
  const auto c = compare(report(SchemeId::STALL, 8, 3), report(SchemeId::SSR, 7, 3));
  EXPECT_NEAR(c.speedup_pct, 100.0 / 7.0, 1e-9);
  EXPECT_EQ(format_pct(c.speedup_pct, 2), "+14.29%");
  EXPECT_NEAR(c.reduction_pct, 12.5, 1e-9);
}

TEST(Compare, EqualCyclesAndSelf) {
  const auto r = report(SchemeId::SSR, 500);
  const auto c = compare(r, r);
  EXPECT_EQ(c.speedup_pct, 0.0);
  EXPECT_EQ(c.reduction_pct, 0.0);
  EXPECT_TRUE(c.states_match);
  EXPECT_EQ(format_pct(0.0, 1), "+0.0%");
}

TEST(Compare, MismatchIsAnError) {
  EXPECT_THROW(compare(report(SchemeId::STALL, 10, 5, 1), report(SchemeId::SSR, 9, 5, 2)), StateMismatch);
  EXPECT_THROW(compare(report(SchemeId::STALL, 10, 5), report(SchemeId::SSR, 9, 6)), StateMismatch);
}

TEST(Compare, AntisymmetricNumerator) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto a = report(SchemeId::STALL, 1 + rng() % 100000);
    const auto b = report(SchemeId::SSR, 1 + rng() % 100000);
    const auto ab = compare(a, b);
    const auto ba = compare(b, a);
    ASSERT_NEAR(ab.reduction_pct * static_cast<double>(a.cycles), -ba.reduction_pct * static_cast<double>(b.cycles),
                1e-6);
    ASSERT_EQ(ab.speedup_pct > 0, ba.speedup_pct < 0);
  }
}

TEST(Json, FieldOrderAndRoundTrip) {
  RunReport r = report(SchemeId::SSR, 1234567, 1000001, 0x0123456789abcdefull);
  r.bubbles = {1, 2, 3, 4};
  r.load_use_events = 77;
  const auto text = emit_json(r);
  const auto j = nlohmann::json::parse(text);
  const auto back = run_report_from_json(j);
  EXPECT_EQ(back.scheme, r.scheme);
  EXPECT_EQ(back.cycles, r.cycles);
  EXPECT_EQ(back.retired, r.retired);
  EXPECT_EQ(back.bubbles.load_use_stall_cycles, 1u);
  EXPECT_EQ(back.bubbles.branch_flush_cycles, 2u);
  EXPECT_EQ(back.bubbles.cache_miss_stall_cycles, 3u);
  EXPECT_EQ(back.bubbles.nobypass_interlock_cycles, 4u);
  EXPECT_EQ(back.load_use_events, 77u);
  EXPECT_EQ(back.final_state_digest, r.final_state_digest);
  EXPECT_EQ(back.halted_cleanly, true);
  EXPECT_NEAR(back.cpi, r.cpi, r.cpi * 1e-6);

  const std::vector<std::string> keys = {"scheme", "cycles", "retired", "cpi", "bubbles", "load_use_events", "digest",
                                         "halted"};
  std::size_t pos = 0;
  for (const auto& k : keys) {
    const auto at = text.find("\"" + k + "\"");
    ASSERT_NE(at, std::string::npos) << k;
    EXPECT_GE(at, pos) << k;
    pos = at;
  }
  EXPECT_EQ(emit_json(r), text);
}

TEST(Json, ComparisonCarriesBothRates) {
  const auto c = compare(report(SchemeId::STALL, 8, 3), report(SchemeId::SSR, 7, 3));
  const auto j = nlohmann::json::parse(emit_json(c));
  EXPECT_TRUE(j.contains("speedup_pct"));
  EXPECT_TRUE(j.contains("reduction_pct"));
  EXPECT_TRUE(j.at("states_match").get<bool>());
}

TEST(Table, ShowsRatesAndCounts) {
  const auto a = report(SchemeId::STALL, 8, 3);
  const auto b = report(SchemeId::SSR, 7, 3);
  const auto text = render_table({a, b}, {compare(a, b)});
  EXPECT_NE(text.find("+14.29%"), std::string::npos);
  EXPECT_NE(text.find("8 -> 7"), std::string::npos);
}
