#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "seqcert/bounds.hpp"
#include "seqcert/pvalues.hpp"
#include "seqcert/verification.hpp"

using namespace seqcert;

TEST(HnInterval, Examples) {
  auto iv = hn_interval(100, 50);
  EXPECT_NEAR(iv.width(), 1.0 / 300.0, 1e-15);
  // Large n, t = 1/2: the interval collapses onto log(2 pi / 4) / 2.
  auto big = hn_interval(100000000, 50000000);
  EXPECT_NEAR(big.midpoint(), 0.5 * std::log(2 * std::numbers::pi * 0.25), 1e-8);
  EXPECT_THROW(hn_interval(10, 0), DomainError);
  EXPECT_THROW(hn_interval(10, 10), DomainError);
}

TEST(PbrMinusCh, Examples) {
  auto iv = pbr_minus_ch_interval(100, 50, 0.25);
  const double lo = -0.5 * std::log(101.0) + 0.5 * std::log(std::numbers::pi / 2) - 0.5 * std::log(1.01);
  EXPECT_NEAR(iv.lo, lo, 1e-14);
  EXPECT_THROW(pbr_minus_ch_interval(100, 20, 0.25), DomainError);
}

TEST(PbrMinusCh, GapIdentity) {
  for (Count n : {10u, 99u, 1000u}) {
    for (Count k = 1; k < n; k += 3) {
      const double t = static_cast<double>(k) / n;
      for (double phi : {0.05, 0.5}) {
        if (phi > t) continue;
        const auto gap = LogPGap::compute(n, k, phi);
        EXPECT_NEAR(gap.gap_pbr, -0.5 * std::log1p(double(n)) + entropy_correction(n, k), 1e-10);
      }
    }
  }
}

TEST(ExactMinusCh, MidpointExample) {
  auto iv = exact_minus_ch_interval(10000, 5000, 0.25);
  const double centre = 0.5 * std::log(1e4) - std::log(3.0 * std::sqrt(0.5 / (2 * std::numbers::pi * 0.5)));
  EXPECT_NEAR(iv.midpoint(), centre, iv.width());
  EXPECT_TRUE(iv.contains(LogPGap::compute(10000, 5000, 0.25).gap_exact));
}

TEST(TailExpansionSlack, SaturatesAtOne) {
  EXPECT_EQ(tail_expansion_slack(10000, 0.5, 0.25), 1.0);
  const double small = tail_expansion_slack(100, 0.51, 0.5);
  EXPECT_NEAR(small, 0.01 * std::sqrt(std::numbers::pi * 100 / (8 * 0.25)), 1e-15);
  EXPECT_LT(small, 1.0);
}

TEST(MillsArgument, PositiveAboveNull) {
  EXPECT_GT(MillsArgument::of(50, 0.6, 0.5).value, 0.0);
  EXPECT_NEAR(MillsArgument::of(100, 0.6, 0.5).value, 2.0, 1e-14);
}

TEST(LogPGap, SignsAboveNull) {
  for (Count n : {10u, 100u, 1000u}) {
    for (Count k = 1; k <= n; ++k) {
      for (double phi : {0.1, 0.4, 0.7}) {
        if (!(static_cast<double>(k) / n > phi)) continue;
        const auto g = LogPGap::compute(n, k, phi);
        EXPECT_LE(g.gap_pbr, 1e-12);
        EXPECT_GE(g.gap_exact, -1e-12);
      }
    }
  }
}

TEST(Containment, ComposedIntervalAndSmallGrid) {
  BoundGrid grid;
  grid.ns = {10, 30, 100, 300};
  grid.phis = {0.1, 0.5, 0.9};
  grid.levels = {0.01};
  const auto report = verify_bounds(grid);
  EXPECT_EQ(report.failures, 0u);
  EXPECT_GT(report.records.size(), 1000u);
  bool saw_composed = false;
  for (const auto& r : report.records) saw_composed |= r.check == "exact_minus_ch_composed";
  EXPECT_TRUE(saw_composed);
}

TEST(Containment, WidthsShrinkWithN) {
  const double t = 0.6;
  const double phi = 0.3;
  double prev[4] = {1e300, 1e300, 1e300, 1e300};
  for (Count n : {10u, 30u, 100u, 300u, 1000u, 10000u}) {
    const Count k = static_cast<Count>(std::llround(t * n));
    const double w[4] = {hn_interval(n, k).width(), pbr_minus_ch_interval(n, k, phi).width(),
                         exact_minus_ch_interval(n, k, phi).width(),
                         exact_minus_pbr_interval(n, k, phi).width()};
    for (int i = 0; i < 4; ++i) {
      EXPECT_LT(w[i], prev[i]) << i << " " << n;
      prev[i] = w[i];
    }
  }
}

TEST(GapAsymptotics, Examples) {
  auto g = gap_asymptotic_params(0.75, 0.25);
  EXPECT_NEAR(g.var_pbr, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(g.mean_exact, std::log(0.5 / 0.75 * std::sqrt(2 * std::numbers::pi / 3)), 1e-15);
  EXPECT_NEAR(g.mean_pbr, std::log(std::sqrt(2 * std::numbers::pi * 0.1875)), 1e-15);
  EXPECT_FALSE(g.pbr_excluded);
  auto half = gap_asymptotic_params(0.5, 0.25);
  EXPECT_EQ(half.var_pbr, 0.0);
  EXPECT_TRUE(half.pbr_excluded);
  EXPECT_TRUE(gap_asymptotic_params(0.75, 0.375).exact_excluded);
  EXPECT_THROW(gap_asymptotic_params(0.25, 0.5), DomainError);
}

TEST(GainAsymptotics, Examples) {
  auto g = gain_asymptotic_params(0.75, 0.25);
  EXPECT_NEAR(g.var, 0.1875 * std::log(9.0) * std::log(9.0), 1e-14);
  EXPECT_NEAR(gain_asymptotic_params(0.5, 0.25).mean, 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-15);
  EXPECT_LT(gain_asymptotic_params(0.5000001, 0.5).mean, 1e-12);
  EXPECT_THROW(gain_asymptotic_params(0.5, 0.5), DomainError);
}
