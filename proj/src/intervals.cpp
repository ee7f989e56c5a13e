#include "seqcert/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace seqcert {

namespace {

constexpr double kPhiFloor = 1e-15;
constexpr int kMaxIterations = 200;
constexpr double kLog2 = 0.69314718055994530942;

double sigma_of(double theta, Count n) {
  return std::sqrt(theta * (1.0 - theta) / static_cast<double>(n));
}

// Bisection for the crossing of a non-increasing -log P(phi) with alpha on
// [lo, hi]. The invariant is f(lo) >= alpha > f(hi); lo is returned.
EndpointResult invert(const std::function<double(double)>& f, double lo, double hi,
                      double alpha) {
  EndpointResult r;
  const double f_lo = f(lo);
  if (f_lo < alpha) {
    r.status = EndpointStatus::NoRejection;
    r.phi_endpoint = 0.0;
    r.residual = f_lo - alpha;
    return r;
  }
  r.status = EndpointStatus::Converged;
  const double f_hi = f(hi);
  if (f_hi >= alpha) {
    r.phi_endpoint = hi;
    r.residual = f_hi - alpha;
    return r;
  }
  double residual = f_lo - alpha;
  Count it = 0;
  while (it < kMaxIterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++it;
    const double fm = f(mid);
    if (fm >= alpha) {
      lo = mid;
      residual = fm - alpha;
    } else {
      hi = mid;
    }
  }
  r.phi_endpoint = lo;
  r.bracket_width = hi - lo;
  r.iterations = it;
  r.residual = residual;
  return r;
}

void finish(EndpointResult& r, Count n, double theta_hat) {
  r.n = n;
  r.theta_hat = theta_hat;
  r.sigma_hat = sigma_of(theta_hat, n);
  r.gamma = gamma_deviation(r);
}

}  // namespace

ConfidenceLevel::ConfidenceLevel(double a) : a_(a) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("significance level a must lie in (0, 1)");
}

ConfidenceLevel ConfidenceLevel::from_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
  return ConfidenceLevel(std::exp(-alpha));
}

EndpointResult endpoint(TestKind kind, Count n, Count k, const ConfidenceLevel& level) {
  if (n == 0) throw DomainError("n must be positive");
  if (k > n) throw DomainError("successes must not exceed n");
  const double theta_hat = static_cast<double>(k) / static_cast<double>(n);
  EndpointResult r;
  if (k == 0) {
    r.status = EndpointStatus::NoRejection;
  } else {
    // Exact tails keep decreasing above theta_hat; CH and PBR are flat
    // there, so their crossing lies in (0, theta_hat].
    const double top = std::nextafter(1.0, 0.0);
    const double hi = kind == TestKind::Exact ? top : std::min(theta_hat, top);
    auto f = [&](double phi) { return log_p(kind, n, k, phi).unclamped(); };
    r = invert(f, kPhiFloor, hi, level.alpha());
  }
  r.boundary = (k == 0 || k == n);
  finish(r, n, theta_hat);
  return r;
}

EndpointResult endpoint(const TrainedSplitState& split, const ConfidenceLevel& level) {
  if (split.successes_training == 0 || split.successes_training == split.m) {
    throw DegenerateTraining("training block has frequency 0 or 1");
  }
  const double hi = std::min(split.theta_hat_m, split.theta_hat_prime);
  EndpointResult r;
  if (hi > kPhiFloor) {
    auto f = [&](double phi) { return trained_log_q(split, phi); };
    r = invert(f, kPhiFloor, hi, level.alpha());
  } else {
    r.status = EndpointStatus::NoRejection;
  }
  const Count k = split.successes_training + split.successes_evaluation;
  r.boundary = (k == 0 || k == split.n);
  finish(r, split.n, split.theta_hat());
  return r;
}

double gamma_deviation(const EndpointResult& result) {
  const double diff = result.theta_hat - result.phi_endpoint;
  if (diff == 0.0) return 0.0;
  if (result.sigma_hat == 0.0) return std::numeric_limits<double>::infinity();
  return diff / result.sigma_hat;
}

BoundInterval endpoint_theorem_interval(TestKind kind, Count n, Count k,
                                        const ConfidenceLevel& level) {
  if (n == 0 || k == 0 || k >= n) throw DomainError("need 1 <= k <= n-1");
  const double nd = static_cast<double>(n);
  const double t = static_cast<double>(k) / nd;
  const double v = nd * t * (1.0 - t);
  const double cap = nd * t * t * (1.0 - t) * (1.0 - t) / 8.0;
  const double alpha = level.alpha();

  auto ch_form = [&](double a_eff) -> BoundInterval {
    if (!(a_eff > 0.0 && a_eff <= cap)) {
      throw HypothesisViolated("effective alpha outside (0, n t^2 (1-t)^2 / 8]");
    }
    const double r = 2.5 * std::sqrt(a_eff) / std::sqrt(v);
    const double base = std::sqrt(2.0 * a_eff);
    return {base / std::sqrt(1.0 + r), base / std::sqrt(1.0 - r)};
  };

  switch (kind) {
    case TestKind::ChernoffHoeffding:
      return ch_form(alpha);
    case TestKind::PBR: {
      const double delta = 0.5 * std::log1p(nd) - entropy_correction(n, k);
      return ch_form(alpha + delta);
    }
    case TestKind::Exact: {
      if (!(alpha > kLog2 && alpha <= cap)) {
        throw HypothesisViolated("alpha outside (log 2, n t^2 (1-t)^2 / 8]");
      }
      const double c1 = 64.0 / (15.0 * std::sqrt(15.0));
      const double c2 = 8.0 / std::sqrt(15.0);
      const double c3 = std::sqrt(std::numbers::pi / 6.0);
      const double c4 = 2.0 / std::sqrt(5.0);
      const double s = std::sqrt(alpha) / std::sqrt(v);
      const double spread = (c3 + c2 * std::sqrt(alpha)) / std::sqrt(v);
      const double y_lo = alpha * (1.0 - c1 * s) - spread;
      const double y_hi = alpha * (1.0 + c1 * s) + spread;
      // q^{-1} is -inf below 0 and below log 2 the max with 0 wins.
      auto qinv0 = [](double y) { return y > kLog2 ? inverse_neg_log_normal_tail(y) : 0.0; };
      return {qinv0(y_lo) * (1.0 - c4 * s), qinv0(y_hi) * (1.0 + c4 * s)};
    }
  }
  throw DomainError("unknown test kind");
}

double binomial_quantile(double r, Count n, double theta) {
  if (!(r > 0.0 && r <= 1.0)) throw DomainError("quantile level r must lie in (0, 1]");
  require_open_probability(theta, "theta");
  if (n == 0) throw DomainError("n must be positive");
  if (r == 1.0) return 1.0;
  const double target = std::log(r);
  double log_cdf = -std::numeric_limits<double>::infinity();
  for (Count i = 0; i < n; ++i) {
    log_cdf = log_add_exp(log_cdf, log_binomial_pmf(n, i, theta));
    if (log_cdf >= target) return static_cast<double>(i) / static_cast<double>(n);
  }
  return 1.0;
}

TwoSidedInterval two_sided(TestKind kind, Count n, Count k, const ConfidenceLevel& level) {
  const ConfidenceLevel half = level.halved();
  const EndpointResult lower = endpoint(kind, n, k, half);
  const EndpointResult flipped = endpoint(kind, n, n - k, half);
  return {lower.phi_endpoint, 1.0 - flipped.phi_endpoint};
}

TrueDeviation true_deviation(double theta, const EndpointResult& result, Count n) {
  require_open_probability(theta, "theta");
  if (n == 0) throw DomainError("n must be positive");
  const double sigma = sigma_of(theta, n);
  return {theta, sigma, (theta - result.phi_endpoint) / sigma};
}

}  // namespace seqcert
