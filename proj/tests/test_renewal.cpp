#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rcp/analysis.hpp"
#include "rcp/renewal.hpp"

namespace {

using rcp::HeavyTailSpec;
using rcp::RenewalClock;

// Gaps 2, 3, 4 then huge: marks {2, 5, 9, ...}.
struct Scripted {
  std::vector<double> gaps;
  mutable std::size_t i = 0;
  void validate() const {}
};

// found by argument-dependent lookup from RenewalClock
double sample(const Scripted& law, double) { return law.i < law.gaps.size() ? law.gaps[law.i++] : 1e9; }

RenewalClock<Scripted> scripted(std::size_t depth = 0) { return {Scripted{{2, 3, 4}}, 1, depth}; }

TEST(Clock, DefinitionsAtMarks) {
  auto c = scripted();
  EXPECT_EQ(c.next_mark(), 2.0);
  EXPECT_EQ(c.excess(3.0), 2.0);
  EXPECT_EQ(c.current_age(3.0), 1.0);
  EXPECT_EQ(c.count_at(3.0), 1u);
  EXPECT_EQ(c.current_age(5.0), 0.0);
  EXPECT_EQ(c.excess(5.0), 4.0);
  EXPECT_EQ(c.count_at(5.0), 2u);
}

TEST(Clock, AdvanceReturnsMarksInWindow) {
  auto c = scripted();
  EXPECT_EQ(c.advance_collect(2.5), std::vector<double>{2.0});
  EXPECT_TRUE(c.advance_collect(3.0).empty());
  EXPECT_EQ(c.last_mark(), 2.0);
  EXPECT_EQ(c.next_mark(), 5.0);
  EXPECT_EQ(c.advance_collect(9.0), (std::vector<double>{5.0, 9.0}));
  EXPECT_EQ(c.count(), 3u);
  EXPECT_LE(c.last_mark(), c.now());
  EXPECT_LT(c.now(), c.next_mark());
  EXPECT_THROW(c.advance_to(8.0), rcp::InputError);
}

TEST(Clock, AgeBeforeFirstMarkUsesZero) {
  auto c = scripted();
  EXPECT_EQ(c.current_age(1.5), 1.5);
  EXPECT_EQ(c.count_at(1.5), 0u);
}

TEST(Clock, PastQueriesNeedHistory) {
  auto bare = scripted();
  bare.advance_to(9.5);
  EXPECT_EQ(bare.excess(9.2), 1e9 + 9 - 9.2);  // still within the current gap
  EXPECT_THROW(bare.excess(3.0), rcp::StateError);

  auto kept = scripted(RenewalClock<Scripted>::kFullHistory);
  kept.advance_to(9.5);
  EXPECT_EQ(kept.excess(3.0), 2.0);
  EXPECT_EQ(kept.current_age(6.0), 1.0);
  EXPECT_EQ(kept.count_at(1.0), 0u);
  EXPECT_EQ(kept.excess(1.0), 1.0);

  auto ring = scripted(1);
  ring.advance_to(9.5);
  EXPECT_EQ(ring.excess(6.0), 3.0);
  EXPECT_THROW(ring.excess(3.0), rcp::StateError);
}

TEST(Clock, ExcessPlusAgeIsGap) {
  RenewalClock<HeavyTailSpec> c(HeavyTailSpec::plain(0.75), 3, RenewalClock<HeavyTailSpec>::kFullHistory);
  c.advance_to(1e4);
  for (double t : {0.3, 10.0, 500.0, 9999.0}) {
    const double gap = c.excess(t) + c.current_age(t);
    EXPECT_GT(gap, 0.0);
    EXPECT_GE(c.current_age(t), 0.0);
  }
}

TEST(Clock, DeterministicStreams) {
  RenewalClock<HeavyTailSpec> a(HeavyTailSpec::plain(0.75), 99), b(HeavyTailSpec::plain(0.75), 99);
  EXPECT_EQ(a.advance_collect(1e5), b.advance_collect(1e5));
  RenewalClock<HeavyTailSpec> c(HeavyTailSpec::plain(0.75), 100);
  a.advance_to(2e5);
  c.advance_to(2e5);
  EXPECT_NE(a.last_mark(), c.last_mark());
}

TEST(Clock, PoissonCount) {
  RenewalClock<rcp::ExponentialRate> c(rcp::ExponentialRate{1.0}, 5);
  c.advance_to(1e4);
  EXPECT_GE(c.count(), 9700u);
  EXPECT_LE(c.count(), 10300u);
  EXPECT_THROW((RenewalClock<rcp::ExponentialRate>(rcp::ExponentialRate{0.0}, 1)), rcp::InputError);
}

TEST(Clock, GapsFollowTheTail) {
  const auto spec = HeavyTailSpec::plain(0.75);
  RenewalClock<HeavyTailSpec> c(spec, 11, RenewalClock<HeavyTailSpec>::kFullHistory);
  std::vector<double> gaps;
  double prev = 0.0;
  c.advance_to(0.0);
  while (gaps.size() < 10000) {
    const double next = c.next_mark();
    gaps.push_back(next - prev);
    prev = next;
    c.advance_to(next);
  }
  const double ks = rcp::ks_statistic(gaps, [&](double t) { return 1.0 - rcp::tail(spec, t); });
  EXPECT_LT(ks, rcp::ks_critical_99(gaps.size()));
}

TEST(Clock, RenewalCountAtLargeTime) {
  const auto spec = HeavyTailSpec::plain(0.75);
  const double t = 1e6;
  const auto counts = rcp::parallel_map(1000, 1, [&](std::size_t r) {
    RenewalClock<HeavyTailSpec> c(spec, rcp::derive_seed(8, rcp::StreamTag::replication, r));
    c.advance_to(t);
    return static_cast<double>(c.count());
  });
  const double mean = rcp::mean_and_stderr(counts).mean;
  // Integrating U'(t) ~ C/m(t) with m regularly varying of index 1-alpha
  // gives U(t) ~ C t / (alpha m(t)).
  const double integrated = rcp::c_alpha(0.75) * t / (0.75 * rcp::truncated_mean(spec, t));
  EXPECT_NEAR(mean / integrated, 1.0, 0.15);
  EXPECT_NEAR(rcp::c_alpha(0.75) * t / rcp::truncated_mean(spec, t), 7.35e3, 0.01 * 7.35e3);
}

TEST(Increment, ValidatesAndVanishesWithWindow) {
  const auto spec = HeavyTailSpec::plain(0.75);
  EXPECT_THROW(rcp::estimate_renewal_increment(spec, 1e4, 0.0, 1000, 1), rcp::InputError);
  EXPECT_THROW(rcp::estimate_renewal_increment(spec, 1e4, 1.0, 10, 1), rcp::InputError);
  const auto tiny = rcp::estimate_renewal_increment(spec, 1e4, 1e-9, 2000, 1);
  EXPECT_LT(tiny.mean, 1e-3);
}

TEST(Increment, WorkerCountInvariant) {
  const auto spec = HeavyTailSpec::plain(0.6);
  const auto a = rcp::estimate_renewal_increment(spec, 1e4, 1.0, 3000, 5, 1);
  const auto b = rcp::estimate_renewal_increment(spec, 1e4, 1.0, 3000, 5, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
}

}  // namespace
