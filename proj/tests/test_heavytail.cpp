#include <gtest/gtest.h>

#include <cmath>

#include "rcp/heavytail.hpp"
#include "rcp/rng.hpp"

namespace {

using rcp::HeavyTailSpec;

TEST(Tail, ClosedFormValues) {
  const auto p = HeavyTailSpec::plain(0.75);
  EXPECT_EQ(rcp::tail(p, 0.0), 1.0);
  EXPECT_NEAR(rcp::tail(p, 15.0), 0.125, 1e-15);
  EXPECT_NEAR(rcp::tail(HeavyTailSpec::plain(0.5), 3.0), 0.5, 1e-15);
  const auto lc = HeavyTailSpec::log_corrected(0.75, 2.0);
  EXPECT_NEAR(rcp::tail(lc, 15.0), std::pow(16.0, -0.75) * std::pow(std::log(std::exp(1.0) + 15.0), -2.0), 1e-15);
  EXPECT_NEAR(rcp::tail(lc, 0.0), 1.0, 1e-15);
}

TEST(Tail, RejectsBadTimes) {
  const auto p = HeavyTailSpec::plain(0.75);
  EXPECT_THROW(rcp::tail(p, -1.0), rcp::InputError);
  EXPECT_THROW(rcp::tail(p, INFINITY), rcp::InputError);
  EXPECT_THROW(rcp::tail(p, NAN), rcp::InputError);
}

TEST(Tail, SpecValidation) {
  EXPECT_THROW(HeavyTailSpec::plain(1.0).validate(), rcp::InputError);
  EXPECT_THROW(HeavyTailSpec::plain(0.0).validate(), rcp::InputError);
  EXPECT_THROW(HeavyTailSpec::log_corrected(0.7, -0.5).validate(), rcp::InputError);
  EXPECT_THROW(rcp::parse_family("pareto"), rcp::InputError);
  EXPECT_EQ(rcp::parse_family("logcorrected"), rcp::Family::log_corrected);
}

TEST(Tail, DecreasingInAlpha) {
  for (double t : {0.5, 3.0, 100.0, 1e6}) {
    EXPECT_GT(rcp::tail(HeavyTailSpec::plain(0.6), t), rcp::tail(HeavyTailSpec::plain(0.75), t));
    EXPECT_GT(rcp::tail(HeavyTailSpec::log_corrected(0.6, 1.0), t),
              rcp::tail(HeavyTailSpec::log_corrected(0.75, 1.0), t));
  }
}

TEST(Tail, SlowVariation) {
  const double t = 1e10;
  for (const auto& s : {HeavyTailSpec::plain(0.75), HeavyTailSpec::log_corrected(0.75, 0.1)}) {
    const double ratio = rcp::tail(s, 2.0 * t) * std::pow(2.0, s.alpha) / rcp::tail(s, t);
    EXPECT_NEAR(ratio, 1.0, 0.01);
  }
}

TEST(TruncatedMean, ClosedForm) {
  const auto p = HeavyTailSpec::plain(0.75);
  EXPECT_EQ(rcp::truncated_mean(p, 0.0), 0.0);
  EXPECT_NEAR(rcp::truncated_mean(p, 15.0), 4.0, 1e-12);
  EXPECT_NEAR(rcp::truncated_mean(p, 1e6), (std::pow(1e6 + 1, 0.25) - 1) / 0.25, 1e-9);
  EXPECT_NEAR(rcp::truncated_mean(p, 1e6), 122.5, 0.1);
  double prev = 0.0;
  for (double t : {1e4, 1e8, 1e12}) {
    const double ratio = rcp::truncated_mean(p, t) * 0.25 / std::pow(t, 0.25);
    EXPECT_GT(ratio, prev);
    EXPECT_LT(ratio, 1.0);
    prev = ratio;
  }
  EXPECT_GT(prev, 0.99);
}

TEST(TruncatedMean, LogCorrectedMatchesTrapezoid) {
  const auto lc = HeavyTailSpec::log_corrected(0.7, 1.5);
  const double t = 50.0;
  const int n = 200000;
  double sum = 0.5 * (rcp::tail(lc, 0.0) + rcp::tail(lc, t));
  for (int i = 1; i < n; ++i) sum += rcp::tail(lc, t * i / n);
  EXPECT_NEAR(rcp::truncated_mean(lc, t), sum * t / n, 1e-7);
  // kappa = 0 is the plain law
  EXPECT_NEAR(rcp::truncated_mean(HeavyTailSpec::log_corrected(0.7, 0.0), t),
              rcp::truncated_mean(HeavyTailSpec::plain(0.7), t), 1e-12);
}

TEST(Sample, InverseTransform) {
  const auto p = HeavyTailSpec::plain(0.75);
  EXPECT_NEAR(rcp::sample(p, 0.5), std::pow(2.0, 4.0 / 3.0) - 1.0, 1e-14);
  EXPECT_NEAR(rcp::sample(p, 0.5), 1.5198420997897462, 1e-14);
  EXPECT_LT(rcp::sample(p, 1.0 - 1e-12), 1e-10);
  EXPECT_GT(rcp::sample(p, 1.0 - 1e-12), 0.0);
  EXPECT_THROW(rcp::sample(p, 0.0), rcp::InputError);
  EXPECT_THROW(rcp::sample(p, 1.0), rcp::InputError);
}

TEST(Sample, BeyondTimeCapIsInfinite) {
  EXPECT_EQ(rcp::sample(HeavyTailSpec::plain(0.75), 1e-308), rcp::kBeyondHorizon);
  EXPECT_TRUE(std::isinf(rcp::sample(HeavyTailSpec::log_corrected(0.75, 1.0), 1e-308)));
}

TEST(Sample, InverseConsistency) {
  rcp::RandomStream rs(42);
  for (const auto& s : {HeavyTailSpec::plain(0.75), HeavyTailSpec::plain(0.6),
                        HeavyTailSpec::log_corrected(0.75, 0.1), HeavyTailSpec::log_corrected(0.9, 3.0)}) {
    for (int i = 0; i < 10000; ++i) {
      const double u = rs.uniform();
      const double t = rcp::sample(s, u);
      if (std::isinf(t)) continue;
      ASSERT_NEAR(rcp::tail(s, t) / u, 1.0, 1e-9) << "u=" << u;
    }
  }
}

TEST(Sample, EmpiricalTailFrequency) {
  const auto p = HeavyTailSpec::plain(0.75);
  rcp::RandomStream rs(7);
  const int n = 1'000'000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += rcp::sample(p, rs.uniform()) > 15.0;
  EXPECT_NEAR(hits / double(n), 0.125, 3.0 * std::sqrt(0.125 * 0.875 / n));
}

TEST(ConditionalSurvival, Values) {
  const auto p = HeavyTailSpec::plain(0.75);
  EXPECT_EQ(rcp::conditional_survival(p, 7.0, 0.0), 1.0);
  EXPECT_NEAR(rcp::conditional_survival(p, 1.0, 3.0), std::pow(0.4, 0.75), 1e-14);
  EXPECT_NEAR(rcp::conditional_survival(p, 1.0, 3.0), 0.5030, 1e-4);
  for (double s : {0.0, 1.0, 1e2, 1e6}) {
    EXPECT_GE(rcp::conditional_survival(p, s, 1e4), std::pow(1e4, -0.8));
  }
}

TEST(ConditionalSurvival, LowerBoundOnGrid) {
  const double eps = 0.05;
  for (double alpha : {0.6, 0.75, 0.9}) {
    for (const auto& s : {HeavyTailSpec::plain(alpha), HeavyTailSpec::log_corrected(alpha, 0.1)}) {
      for (double t = 1e3; t <= 1e12; t *= 3.0) {
        for (double age = 0.0; age <= 1e8; age = age == 0.0 ? 1.0 : age * 10.0) {
          ASSERT_GE(rcp::conditional_survival(s, age, t), std::pow(t, -(alpha + eps)))
              << "alpha=" << alpha << " t=" << t << " s=" << age;
        }
      }
    }
  }
}

}  // namespace
