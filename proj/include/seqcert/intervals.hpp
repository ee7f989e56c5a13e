#pragma once

// One-sided lower confidence endpoints by inverting the tests over phi,
// their normalized deviations, and the assembled two-sided interval.

#include <cmath>

#include "seqcert/core.hpp"
#include "seqcert/pvalues.hpp"
#include "seqcert/supermartingale.hpp"

namespace seqcert {

/// Significance a in (0, 1); alpha = -log a.
class ConfidenceLevel {
 public:
  explicit ConfidenceLevel(double a);
  static ConfidenceLevel from_alpha(double alpha);

  double a() const { return a_; }
  double alpha() const { return -std::log(a_); }
  /// The level a / 2 used for each side of a two-sided interval.
  ConfidenceLevel halved() const { return ConfidenceLevel(0.5 * a_); }

 private:
  double a_;
};

enum class EndpointStatus {
  Converged,
  /// Even phi -> 0+ does not reach significance; the endpoint is 0.
  NoRejection,
};

struct EndpointResult {
  double phi_endpoint = 0.0;
  double gamma = 0.0;
  double sigma_hat = 0.0;
  double bracket_width = 0.0;
  Count iterations = 0;
  EndpointStatus status = EndpointStatus::NoRejection;
  double theta_hat = 0.0;
  Count n = 0;
  /// -log P at the returned endpoint minus alpha.
  double residual = 0.0;
  /// k = 0 or k = n; handled, but outside the asymptotic theory.
  bool boundary = false;

  bool converged() const { return status == EndpointStatus::Converged; }
};

struct TrueDeviation {
  double theta;
  double sigma;
  double tilde_gamma;
};

/// Largest phi such that every phi' <= phi is rejected at level a.
EndpointResult endpoint(TestKind kind, Count n, Count k, const ConfidenceLevel& level);
/// Same for the training-split test, inverting over phi <= min(theta_hat_m,
/// theta_hat_prime).
EndpointResult endpoint(const TrainedSplitState& split, const ConfidenceLevel& level);

/// (theta_hat - phi_a) / sigma_hat. Zero when the endpoint equals
/// theta_hat, infinite when sigma_hat vanishes below it.
double gamma_deviation(const EndpointResult& result);

/// Interval the deviation gamma must lie in, per the endpoint theorems.
/// Throws HypothesisViolated outside their hypotheses.
BoundInterval endpoint_theorem_interval(TestKind kind, Count n, Count k,
                                        const ConfidenceLevel& level);

/// Smallest k/n with P(Binomial(n, theta) <= k) >= r.
double binomial_quantile(double r, Count n, double theta);

struct TwoSidedInterval {
  double lower;
  double upper;
};

TwoSidedInterval two_sided(TestKind kind, Count n, Count k, const ConfidenceLevel& level);

TrueDeviation true_deviation(double theta, const EndpointResult& result, Count n);

}  // namespace seqcert
