#pragma once

// Grid sweeps that check every computed log-p gap, h_n value and endpoint
// deviation against its interval oracle.

#include <string>
#include <vector>

#include "seqcert/core.hpp"

namespace seqcert {

struct BoundGrid {
  std::vector<Count> ns;
  std::vector<double> phis;
  /// Significance levels for the endpoint-deviation checks; empty skips them.
  std::vector<double> levels;
  /// Exact-test containments require t - phi >= this many sqrt(phi(1-phi)/n).
  double exclusion_sds = 3.0;

  /// n in {10, 30, 100, 300, 1000, 10^4}, phi in {0.1, ..., 0.9},
  /// a in {0.1, 0.01, 0.001}.
  static BoundGrid standard();
};

struct ContainmentRecord {
  std::string check;
  Count n = 0;
  Count k = 0;
  /// NaN where the check does not depend on it.
  double phi = 0.0;
  double a = 0.0;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<ContainmentRecord> records;
  Count failures = 0;
  /// Endpoint points outside the endpoint theorems' hypotheses.
  Count skipped = 0;
};

/// Absolute tolerance granted to a containment whose computed quantity
/// is a difference of log-p values of size `scale`.
double containment_slack(double scale);

/// Records are ordered by (check, n, phi or a, k) regardless of threading.
VerificationReport verify_bounds(const BoundGrid& grid);

}  // namespace seqcert
