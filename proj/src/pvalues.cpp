#include "seqcert/pvalues.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seqcert {

namespace {

void check_counts(Count n, Count k, double phi) {
  if (n == 0) throw DomainError("n must be positive");
  if (k > n) throw DomainError("successes must not exceed n");
  require_open_probability(phi, "phi");
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

constexpr double kTailCutoff = 1e-17;

}  // namespace

std::string_view to_string(TestKind kind) {
  switch (kind) {
    case TestKind::Exact:
      return "exact";
    case TestKind::ChernoffHoeffding:
      return "ch";
    case TestKind::PBR:
      return "pbr";
  }
  return "unknown";
}

TestKind parse_test_kind(std::string_view name) {
  if (name == "exact" || name == "Exact" || name == "x") return TestKind::Exact;
  if (name == "ch" || name == "ChernoffHoeffding") return TestKind::ChernoffHoeffding;
  if (name == "pbr" || name == "PBR") return TestKind::PBR;
  throw DomainError("unknown test kind '" + std::string(name) + "'");
}

ThetaMaxView ThetaMaxView::of(Count n, Count k, double phi) {
  check_counts(n, k, phi);
  const double t = static_cast<double>(k) / static_cast<double>(n);
  return {t, phi, t > phi ? t : phi};
}

LogPValue log_p_exact(Count n, Count k, double phi) {
  check_counts(n, k, phi);
  if (k == 0) return LogPValue::from_neg_log(0.0);

  // Sum outward from the largest term i0 = max(k, mode). Terms are
  // scaled by the largest one; both directions decay geometrically.
  const double odds = phi / (1.0 - phi);
  const auto mode = static_cast<Count>(std::floor((static_cast<double>(n) + 1.0) * phi));
  const Count start = std::max(k, std::min(mode, n));
  const double log_peak = log_binomial_pmf(n, start, phi);

  CompensatedSum total;
  total.add(1.0);
  for (Count i = start + 1; i <= n; ++i) {
    const double term = std::exp(log_binomial_pmf(n, i, phi) - log_peak);
    total.add(term);
    // ratio of successive terms beyond i, an upper bound for the rest
    const double r = odds * static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (r < 1.0 && term * r / (1.0 - r) < kTailCutoff * total.value()) break;
  }
  for (Count i = start; i > k;) {
    --i;
    const double term = std::exp(log_binomial_pmf(n, i, phi) - log_peak);
    total.add(term);
    const double r = static_cast<double>(i) / (odds * static_cast<double>(n - i + 1));
    if (r < 1.0 && term * r / (1.0 - r) < kTailCutoff * total.value()) break;
  }
  return LogPValue::from_neg_log(-(log_peak + std::log(total.value())));
}

LogPValue log_p_ch(Count n, Count k, double phi) {
  const auto view = ThetaMaxView::of(n, k, phi);
  if (view.theta_hat < phi) return LogPValue::from_neg_log(0.0);
  return LogPValue::from_neg_log(static_cast<double>(n) * kl_bernoulli(view.theta_hat, phi));
}

LogPValue log_p_pbr(Count n, Count k, double phi) {
  const auto view = ThetaMaxView::of(n, k, phi);
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  double log_bound = std::log1p(nd) + log_binomial(n, k);
  if (view.theta_hat >= phi) {
    log_bound += kd * std::log(phi) + (nd - kd) * std::log1p(-phi);
  } else {
    // maximiser phi' = theta_hat; 0 log 0 = 0
    const double t = view.theta_hat;
    if (k > 0) log_bound += kd * std::log(t);
    log_bound += (nd - kd) * std::log1p(-t);
  }
  return LogPValue::from_neg_log(-log_bound);
}

LogPValue log_p(TestKind kind, Count n, Count k, double phi) {
  switch (kind) {
    case TestKind::Exact:
      return log_p_exact(n, k, phi);
    case TestKind::ChernoffHoeffding:
      return log_p_ch(n, k, phi);
    case TestKind::PBR:
      return log_p_pbr(n, k, phi);
  }
  throw DomainError("unknown test kind");
}

}  // namespace seqcert
