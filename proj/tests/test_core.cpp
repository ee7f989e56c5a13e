#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "seqcert/bounds.hpp"
#include "seqcert/core.hpp"

using namespace seqcert;

TEST(TrialSequence, PrefixSums) {
  const std::vector<int> bits = {1, 0, 1, 1};
  TrialSequence seq(bits);
  EXPECT_EQ(seq.size(), 4u);
  EXPECT_EQ(seq.successes(0), 0u);
  EXPECT_EQ(seq.successes(2), 1u);
  EXPECT_EQ(seq.successes(), 3u);
  EXPECT_DOUBLE_EQ(seq.theta_hat(), 0.75);
  EXPECT_THROW(seq.theta_hat(0), DomainError);
}

TEST(TrialSequence, RejectsNonBits) {
  TrialSequence seq;
  EXPECT_THROW(seq.push_back(2), DomainError);
  EXPECT_THROW(seq.push_back(-1), DomainError);
}

TEST(NullSpec, RejectsBoundaryAndNaN) {
  EXPECT_THROW(NullSpec(0.0), DomainError);
  EXPECT_THROW(NullSpec(1.0), DomainError);
  EXPECT_THROW(NullSpec(std::nan("")), DomainError);
  EXPECT_EQ(NullSpec(0.3, NullSemantics::ExtendedNull).semantics(), NullSemantics::ExtendedNull);
}

TEST(LogPValue, ClampsValueButKeepsRawBound) {
  auto lp = LogPValue::from_neg_log(-0.5);
  EXPECT_EQ(lp.value(), 0.0);
  EXPECT_EQ(lp.unclamped(), -0.5);
  EXPECT_EQ(lp.p(), 1.0);
  EXPECT_DOUBLE_EQ(lp.gain(2), -0.25);
  EXPECT_THROW(LogPValue::from_neg_log(std::nan("")), DomainError);
  EXPECT_NEAR(LogPValue::from_neg_log(std::log(100.0)).log10_p(), -2.0, 1e-15);
}

TEST(BoundInterval, Arithmetic) {
  BoundInterval a(1.0, 2.0);
  BoundInterval b(-0.5, 0.5);
  auto c = a + b;
  EXPECT_EQ(c.lo, 0.5);
  EXPECT_EQ(c.hi, 2.5);
  EXPECT_TRUE(a.contains(2.0));
  EXPECT_FALSE(a.contains(2.1));
  EXPECT_TRUE(a.contains(2.1, 0.2));
  EXPECT_THROW(BoundInterval(2.0, 1.0), DomainError);
}

TEST(KlBernoulli, Examples) {
  EXPECT_EQ(kl_bernoulli(0.5, 0.5), 0.0);
  EXPECT_NEAR(kl_bernoulli(1.0, 0.5), std::numbers::ln2, 1e-16);
  EXPECT_NEAR(kl_bernoulli(0.75, 0.5), 0.13081203594113695913, 1e-16);
  EXPECT_NEAR(kl_bernoulli(0.0, 0.25), -std::log(0.75), 1e-16);
  EXPECT_THROW(kl_bernoulli(0.5, 0.0), DomainError);
  EXPECT_THROW(kl_bernoulli(1.5, 0.5), DomainError);
  EXPECT_THROW(kl_bernoulli(std::nan(""), 0.5), DomainError);
}

TEST(KlBernoulli, MonotoneAwayFromT) {
  for (double t : {0.1, 0.3, 0.5, 0.8}) {
    double prev = kl_bernoulli(t, 0.001);
    for (double phi = 0.002; phi < t - 1e-9; phi += 0.001) {
      const double cur = kl_bernoulli(t, phi);
      EXPECT_LT(cur, prev) << t << " " << phi;
      prev = cur;
    }
    prev = kl_bernoulli(t, t);
    for (double phi = t + 0.001; phi < 0.999; phi += 0.001) {
      const double cur = kl_bernoulli(t, phi);
      EXPECT_GT(cur, prev) << t << " " << phi;
      prev = cur;
    }
  }
}

TEST(LogBinomial, SmallExamples) {
  EXPECT_EQ(log_binomial(1, 1), 0.0);
  EXPECT_NEAR(log_binomial(4, 2), std::log(6.0), 1e-15);
  EXPECT_NEAR(log_binomial(100, 50), 66.783841652017426, 1e-12);
  EXPECT_THROW(log_binomial(3, 4), DomainError);
}

TEST(LogBinomial, MatchesBigIntegerOracle) {
  for (unsigned n = 1; n <= 200; ++n) {
    for (unsigned k = 0; k <= n; ++k) {
      const double expect = oracle::log_binomial(n, k);
      ASSERT_NEAR(log_binomial(n, k), expect, 1e-12 + 1e-14 * expect) << n << " " << k;
    }
  }
  for (unsigned n : {1000u, 12345u, 100000u}) {
    for (unsigned k : {1u, 7u, n / 3, n / 2, n - 2}) {
      const double expect = oracle::log_binomial(n, k);
      EXPECT_NEAR(log_binomial(n, k), expect, 1e-13 * expect) << n << " " << k;
    }
  }
}

TEST(StirlingRemainder, MatchesHighPrecisionLogFactorial) {
  for (unsigned m = 1; m <= 300; ++m) {
    oracle::Big mb(m);
    const oracle::Big rem = boost::multiprecision::lgamma(mb + 1) -
                            (mb * log(mb) - mb + log(2 * boost::math::constants::pi<oracle::Big>() * mb) / 2);
    EXPECT_NEAR(stirling_remainder(m), static_cast<double>(rem), 1e-15) << m;
  }
}

TEST(EntropyCorrection, Examples) {
  EXPECT_NEAR(entropy_correction(5, 0), -std::log(6.0) / 2, 1e-15);
  EXPECT_NEAR(entropy_correction(5, 5), -std::log(6.0) / 2, 1e-15);
  EXPECT_NEAR(entropy_correction(2, 1), 0.14384103622589046372, 1e-15);
  EXPECT_TRUE(hn_interval(100, 50).contains(entropy_correction(100, 50)));
}

TEST(EntropyCorrection, MatchesHighPrecisionOracle) {
  for (unsigned n : {2u, 3u, 10u, 57u, 100u, 1000u, 10000u}) {
    for (unsigned k = 0; k <= n; k += std::max(1u, n / 37)) {
      EXPECT_NEAR(entropy_correction(n, k), oracle::entropy_correction(n, k), 1e-13) << n << " " << k;
    }
  }
}

TEST(EntropyCorrection, InsideAsymptoticIntervalOnLogGrid) {
  std::mt19937_64 rng(11);
  for (double e = std::log(2.0); e <= std::log(1e4); e += 0.05) {
    const auto n = static_cast<Count>(std::llround(std::exp(e)));
    std::uniform_int_distribution<Count> pick(1, n - 1);
    for (int s = 0; s < 40 && n >= 2; ++s) {
      const Count k = pick(rng);
      const auto iv = hn_interval(n, k);
      EXPECT_TRUE(iv.contains(entropy_correction(n, k), 1e-12)) << n << " " << k;
    }
  }
}

TEST(MillsRatio, ReferenceValues) {
  EXPECT_NEAR(mills_ratio(0.0), std::sqrt(std::numbers::pi / 2), 1e-16);
  EXPECT_NEAR(mills_ratio(1.0), 0.65567954241879847154, 1e-15);
  EXPECT_NEAR(mills_ratio(2.0), 0.42136922928805447322, 1e-15);
  EXPECT_NEAR(mills_ratio(8.0), 0.12313196325793229628, 1e-16);
  EXPECT_NEAR(mills_ratio(10.0), 0.099028596471731921395, 1e-16);
  EXPECT_GT(mills_ratio(10.0), 10.0 / 101.0);
  EXPECT_LT(mills_ratio(10.0), 0.1);
  EXPECT_THROW(mills_ratio(-1.0), DomainError);
}

TEST(MillsRatio, BracketsOnLogGrid) {
  for (double e = -3.0; e <= 3.0; e += 0.01) {
    const double x = std::pow(10.0, e);
    const double y = mills_ratio(x);
    EXPECT_GT(y, x / (1 + x * x)) << x;
    EXPECT_LT(y, 1 / x) << x;
    const double d = -std::log(x * y);
    EXPECT_GE(d, 0.0) << x;
    EXPECT_LE(d, 1 / (x * x)) << x;
  }
}

TEST(NegLogNormalTail, ReferenceValues) {
  EXPECT_NEAR(neg_log_normal_tail(0.0), std::numbers::ln2, 1e-15);
  EXPECT_NEAR(neg_log_normal_tail(1.0), 1.8410216450092635058, 1e-15);
  EXPECT_NEAR(neg_log_normal_tail(2.0), 3.7831843336820319, 1e-14);
  for (double x = 0.05; x < 40; x += 0.05) {
    EXPECT_GE(neg_log_normal_tail(x), x * x / 2 + std::log(2 * std::numbers::pi) / 2 + std::log(x));
  }
}

TEST(NegLogNormalTail, StrictlyIncreasing) {
  double prev = neg_log_normal_tail(0.0);
  for (double x = 0.01; x < 40; x += 0.01) {
    const double cur = neg_log_normal_tail(x);
    EXPECT_GT(cur, prev) << x;
    prev = cur;
  }
}

TEST(InverseNegLogNormalTail, Examples) {
  EXPECT_NEAR(inverse_neg_log_normal_tail(neg_log_normal_tail(1.0)), 1.0, 1e-13);
  EXPECT_NEAR(inverse_neg_log_normal_tail(-std::log(1e-4)), 3.7190164854556805644, 1e-13);
  const double x = inverse_neg_log_normal_tail(6.0);
  EXPECT_GE(x * x, 6.0 - neg_log_normal_tail(1.0) + 1.0);
  EXPECT_LE(x * x, 2.0 * (6.0 - std::numbers::ln2));
  EXPECT_THROW(inverse_neg_log_normal_tail(0.5), DomainError);
  EXPECT_THROW(inverse_neg_log_normal_tail(std::numbers::ln2), DomainError);
}

TEST(InverseNegLogNormalTail, RoundTripAndQuantileOracle) {
  for (double x = 0.1; x <= 40; x += 0.1) {
    EXPECT_NEAR(inverse_neg_log_normal_tail(neg_log_normal_tail(x)), x, 1e-9 * x) << x;
  }
  for (double alpha = 0.8; alpha < 700; alpha *= 1.3) {
    EXPECT_NEAR(inverse_neg_log_normal_tail(alpha), oracle::normal_tail_quantile(alpha), 1e-10)
        << alpha;
  }
}

TEST(LogAddExp, HandlesInfinities) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(log_add_exp(-inf, 1.5), 1.5);
  EXPECT_NEAR(log_add_exp(0.0, 0.0), std::numbers::ln2, 1e-16);
  EXPECT_NEAR(log_add_exp(1000.0, 1000.0), 1000.0 + std::numbers::ln2, 1e-12);
}
