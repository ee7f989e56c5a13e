#include "seqcert/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace seqcert {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;
constexpr double kLog2 = std::numbers::ln2;

// log m! - Stirling for m = 0..15; entry 0 is unused.
constexpr std::array<double, 16> kStirlingTable = {
    0.0,
    0.08106146679532725821967,
    0.04134069595540929409382,
    0.02767792568499833914879,
    0.02079067210376509311152,
    0.01664469118982119216319,
    0.01387612882307074799875,
    0.01189670994589177009506,
    0.01041126526197209649748,
    0.009255462182712732917729,
    0.008330563433362871256469,
    0.007573675487951840794972,
    0.006942840107209529865664,
    0.00640899418800420706844,
    0.005951370112758847735624,
    0.005554733551962801371039,
};

// x log(x / m) + m - x, evaluated without cancellation when x ~ m.
double deviance_term(double x, double m) {
  if (std::fabs(x - m) < 0.1 * (x + m)) {
    double v = (x - m) / (x + m);
    double s = (x - m) * v;
    double ej = 2.0 * x * v;
    const double v2 = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v2;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / m) + m - x;
}

// Exact C(n, k) for n <= 64 via 128-bit intermediates.
double exact_log_binomial_small(Count n, Count k) {
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (Count i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
  }
  return std::log(static_cast<long double>(c));
}

}  // namespace

// ---------------------------------------------------------------------------

TrialSequence::TrialSequence(std::span<const int> bits) {
  outcomes_.reserve(bits.size());
  prefix_.reserve(bits.size() + 1);
  for (int b : bits) push_back(b);
}

TrialSequence::TrialSequence(std::span<const std::uint8_t> bits) {
  outcomes_.reserve(bits.size());
  prefix_.reserve(bits.size() + 1);
  for (auto b : bits) push_back(b);
}

void TrialSequence::push_back(int bit) {
  if (bit != 0 && bit != 1) {
    throw DomainError("trial outcome must be 0 or 1, got " + std::to_string(bit));
  }
  outcomes_.push_back(static_cast<std::uint8_t>(bit));
  prefix_.push_back(prefix_.back() + static_cast<Count>(bit));
}

double TrialSequence::theta_hat(Count k) const {
  if (k == 0) throw DomainError("theta_hat needs at least one trial");
  return static_cast<double>(successes(k)) / static_cast<double>(k);
}

NullSpec::NullSpec(double phi, NullSemantics semantics)
    : phi_(require_open_probability(phi, "phi")), semantics_(semantics) {}

LogPValue LogPValue::from_neg_log(double neg_log_bound) {
  if (std::isnan(neg_log_bound)) throw DomainError("log p-value is NaN");
  return LogPValue(neg_log_bound);
}

double LogPValue::p() const { return std::exp(-value()); }

double LogPValue::log10_p() const { return -value() / std::numbers::ln10; }

double LogPValue::gain(Count n) const {
  if (n == 0) throw DomainError("gain needs n >= 1");
  return neg_log_p_ / static_cast<double>(n);
}

BoundInterval::BoundInterval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (std::isnan(lo) || std::isnan(hi)) throw DomainError("interval endpoint is NaN");
  if (lo > hi) throw DomainError("interval has lo > hi");
}

BoundInterval operator+(const BoundInterval& a, const BoundInterval& b) {
  return {a.lo + b.lo, a.hi + b.hi};
}

double require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string(what) + " must be finite");
  return x;
}

double require_open_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError(std::string(what) + " must lie in (0, 1)");
  }
  return p;
}

double require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1]");
  }
  return p;
}

// ---------------------------------------------------------------------------

double kl_bernoulli(double t, double phi) {
  require_probability(t, "t");
  require_open_probability(phi, "phi");
  double kl = 0.0;
  if (t > 0.0) kl += t * std::log(t / phi);
  if (t < 1.0) kl += (1.0 - t) * std::log((1.0 - t) / (1.0 - phi));
  // Rounding can leave a tiny negative value when t ~ phi.
  return kl < 0.0 ? 0.0 : kl;
}

double stirling_remainder(Count m) {
  if (m == 0) throw DomainError("stirling_remainder needs m >= 1");
  if (m < kStirlingTable.size()) return kStirlingTable[m];
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  const double x = static_cast<double>(m);
  const double x2 = x * x;
  if (m > 500) return (s0 - s1 / x2) / x;
  if (m > 80) return (s0 - (s1 - s2 / x2) / x2) / x;
  if (m > 35) return (s0 - (s1 - (s2 - s3 / x2) / x2) / x2) / x;
  return (s0 - (s1 - (s2 - (s3 - s4 / x2) / x2) / x2) / x2) / x;
}

double log_binomial(Count n, Count k) {
  if (k > n) throw DomainError("log_binomial needs k <= n");
  if (k == 0 || k == n) return 0.0;
  if (n <= 64) return exact_log_binomial_small(n, k);
  const Count j = std::min(k, n - k);
  const double nd = static_cast<double>(n);
  const double jd = static_cast<double>(j);
  const double rest = nd - jd;
  const double entropy = jd * std::log(nd / jd) - rest * std::log1p(-jd / nd);
  return entropy + 0.5 * std::log(nd / (jd * rest)) - kLogSqrt2Pi + stirling_remainder(n) -
         stirling_remainder(j) - stirling_remainder(n - j);
}

double log_binomial_pmf(Count n, Count i, double p) {
  require_open_probability(p, "p");
  if (i > n) throw DomainError("log_binomial_pmf needs i <= n");
  const double nd = static_cast<double>(n);
  if (i == 0) return nd * std::log1p(-p);
  if (i == n) return nd * std::log(p);
  const double id = static_cast<double>(i);
  const double rest = nd - id;
  return 0.5 * std::log(nd / (id * rest)) - kLogSqrt2Pi + stirling_remainder(n) -
         stirling_remainder(i) - stirling_remainder(n - i) - deviance_term(id, nd * p) -
         deviance_term(rest, nd * (1.0 - p));
}

double entropy_correction(Count n, Count k) {
  if (n == 0) throw DomainError("entropy_correction needs n >= 1");
  if (k > n) throw DomainError("entropy_correction needs k <= n");
  const double nd = static_cast<double>(n);
  if (k == 0 || k == n) return -0.5 * std::log1p(nd);
  // The n H(t) terms cancel exactly against the Stirling expansion of the
  // binomial coefficient; only the remainders survive.
  const double kd = static_cast<double>(k);
  const double t_one_minus_t = kd * (nd - kd) / (nd * nd);
  return 0.5 * std::log(t_one_minus_t) + kLogSqrt2Pi - 0.5 * std::log1p(1.0 / nd) +
         (stirling_remainder(k) + stirling_remainder(n - k) - stirling_remainder(n));
}

double mills_ratio(double x) {
  if (std::isnan(x) || x < 0.0) throw DomainError("mills_ratio needs x >= 0");
  if (std::isinf(x)) return 0.0;
  if (x < 5.0) {
    return std::sqrt(std::numbers::pi / 2.0) * std::exp(0.5 * x * x) *
           std::erfc(x / std::numbers::sqrt2);
  }
  // Laplace continued fraction 1/(x + 1/(x + 2/(x + ...))).
  double f = x;
  for (int j = 60; j >= 1; --j) f = x + j / f;
  return 1.0 / f;
}

double neg_log_normal_tail(double x) {
  if (std::isnan(x) || x < 0.0) throw DomainError("neg_log_normal_tail needs x >= 0");
  return 0.5 * x * x + kLogSqrt2Pi - std::log(mills_ratio(x));
}

double inverse_neg_log_normal_tail(double alpha) {
  require_finite(alpha, "alpha");
  if (!(alpha > kLog2)) throw DomainError("inverse_neg_log_normal_tail needs alpha > log 2");

  static const double q_at_one = neg_log_normal_tail(1.0);
  double lo = 0.0;
  double hi = std::sqrt(2.0 * (alpha - kLog2));
  if (alpha >= q_at_one) lo = std::sqrt(alpha - q_at_one + 1.0);

  // Start from the fixed-point approximation x^2 ~ z0 - log z0.
  const double z0 = 2.0 * alpha - std::log(2.0 * std::numbers::pi);
  double x = (z0 > 1.0) ? std::sqrt(z0 - std::log(z0)) : 0.5 * (lo + hi);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);

  const double tol = 1e-14 * std::max(1.0, alpha);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = neg_log_normal_tail(x) - alpha;
    if (std::fabs(f) <= tol) return x;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    // dq/dx = 1 / Y(x)
    double next = x - f * mills_ratio(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return next;
    x = next;
  }
  return x;
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

}  // namespace seqcert
