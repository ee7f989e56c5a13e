#pragma once

// Domain types and scalar kernels shared by every other seqcert module.
//
// All log quantities are natural logs. Every function here is pure and
// thread-safe.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqcert {

/// Raised for arguments outside a function's mathematical domain,
/// including any NaN input.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A theorem's hypotheses do not hold for the requested inputs. Callers
/// are expected to skip the point rather than clamp it.
class HypothesisViolated : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Inconsistent simulation or engine configuration.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Count = std::uint64_t;

/// Ordered Bernoulli outcomes with prefix sums S_k for every k <= n.
class TrialSequence {
 public:
  TrialSequence() = default;
  explicit TrialSequence(std::span<const int> bits);
  explicit TrialSequence(std::span<const std::uint8_t> bits);

  void push_back(int bit);

  Count size() const { return static_cast<Count>(outcomes_.size()); }
  bool empty() const { return outcomes_.empty(); }
  int outcome(Count i) const { return outcomes_.at(i); }

  /// S_k, the number of successes among the first k trials (S_0 = 0).
  Count successes(Count k) const { return prefix_.at(k); }
  Count successes() const { return prefix_.back(); }

  /// S_k / k; requires k >= 1.
  double theta_hat(Count k) const;
  double theta_hat() const { return theta_hat(size()); }

  std::span<const std::uint8_t> outcomes() const { return outcomes_; }

 private:
  std::vector<std::uint8_t> outcomes_;
  std::vector<Count> prefix_{0};
};

enum class NullSemantics { PointNull, CompositeNull, ExtendedNull };

/// The null parameter phi in (0, 1) and which null family it denotes:
/// {nu_phi}, B_phi = {nu_theta : theta <= phi}, or the extended
/// (past-dependent) null.
class NullSpec {
 public:
  explicit NullSpec(double phi, NullSemantics semantics = NullSemantics::CompositeNull);

  double phi() const { return phi_; }
  NullSemantics semantics() const { return semantics_; }

 private:
  double phi_;
  NullSemantics semantics_;
};

/// -log of a p-value bound.
///
/// Some bounds (PBR near phi = theta_hat, or trained factors on the
/// wrong side of phi) exceed 1. The raw -log(bound) is kept in
/// `unclamped()`; `value()` is the p-value proper, -log min(1, bound),
/// and is never negative.
class LogPValue {
 public:
  constexpr LogPValue() = default;
  static LogPValue from_neg_log(double neg_log_bound);

  double value() const { return neg_log_p_ <= 0.0 ? 0.0 : neg_log_p_; }
  double unclamped() const { return neg_log_p_; }
  double p() const;
  double log10_p() const;
  /// G_n = -log(P_n) / n, computed from the unclamped bound.
  double gain(Count n) const;

 private:
  explicit constexpr LogPValue(double v) : neg_log_p_(v) {}
  double neg_log_p_ = 0.0;
};

/// Closed interval [lo, hi].
struct BoundInterval {
  double lo = 0.0;
  double hi = 0.0;

  BoundInterval() = default;
  BoundInterval(double lo_, double hi_);

  bool contains(double x, double slack = 0.0) const {
    return x >= lo - slack && x <= hi + slack;
  }
  double width() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
  BoundInterval shifted(double by) const { return {lo + by, hi + by}; }
};

BoundInterval operator+(const BoundInterval& a, const BoundInterval& b);

// ---------------------------------------------------------------------------
// Validation helpers

double require_finite(double x, const char* what);
/// phi in the open interval (0, 1).
double require_open_probability(double p, const char* what);
/// t in the closed interval [0, 1].
double require_probability(double p, const char* what);

// ---------------------------------------------------------------------------
// Kernels

/// KL(nu_t | nu_phi) for Bernoulli distributions, with 0 log 0 = 0.
double kl_bernoulli(double t, double phi);

/// log m! - (m log m - m + log sqrt(2 pi m)), m >= 1.
double stirling_remainder(Count m);

/// log C(n, k).
double log_binomial(Count n, Count k);

/// log of the Binomial(n, p) probability mass at i, accurate in relative
/// terms even for large n (saddle-point form).
double log_binomial_pmf(Count n, Count i, double p);

/// -n t log t - n(1-t) log(1-t) - log C(n, nt) - log(n+1)/2, with t = k/n.
double entropy_correction(Count n, Count k);

/// Mills-ratio function Y(x) = exp(x^2/2) * int_x^inf exp(-s^2/2) ds.
double mills_ratio(double x);

/// -log of the standard normal upper tail at x >= 0.
double neg_log_normal_tail(double x);

/// Inverse of neg_log_normal_tail on (log 2, inf).
double inverse_neg_log_normal_tail(double alpha);

/// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

}  // namespace seqcert
