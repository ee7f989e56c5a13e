#pragma once

// Explicit interval bounds on the log(p)-value differences and their
// asymptotic constants. Inputs are (n, k) with t = k/n so that nt is an
// integer by construction.

#include "seqcert/core.hpp"

namespace seqcert {

/// -log p-values of the three tests referenced to the CH value.
struct LogPGap {
  double reference;  // -log P_CH = n KL(t|phi)
  double gap_pbr;    // -log P_PBR - reference
  double gap_exact;  // -log P_X - reference

  static LogPGap compute(Count n, Count k, double phi);
};

/// sqrt(n / (phi (1-phi))) (t - phi), the argument of the Mills ratio in
/// the exact-tail expansion.
struct MillsArgument {
  double value;

  static MillsArgument of(Count n, double t, double phi);
};

/// min((t-phi) sqrt(pi n / (8 phi (1-phi))), 1).
double tail_expansion_slack(Count n, double t, double phi);

/// Interval containing entropy_correction(n, k); requires 1 <= k <= n-1.
BoundInterval hn_interval(Count n, Count k);

/// Interval containing -log P_PBR + log P_CH; requires phi <= k/n.
BoundInterval pbr_minus_ch_interval(Count n, Count k, double phi);

/// Interval containing -log P_X + log P_CH (Mills ratio eliminated);
/// requires phi < k/n.
BoundInterval exact_minus_ch_interval(Count n, Count k, double phi);

/// Interval containing -log P_X + log P_PBR, using the Mills ratio.
BoundInterval exact_minus_pbr_interval(Count n, Count k, double phi);

/// Centering constants and limiting variances of the sqrt(n)-scaled gaps.
/// The limit theorem excludes theta = 1/2 for the PBR gap and
/// phi = theta(2 theta - 1) for the exact gap; those cases are flagged
/// rather than thrown so that callers can report them.
struct GapAsymptotics {
  double mean_pbr;
  double var_pbr;
  double mean_exact;
  double var_exact;
  bool pbr_excluded;
  bool exact_excluded;
};

GapAsymptotics gap_asymptotic_params(double theta, double phi);

struct GainAsymptotics {
  double mean;  // KL(theta | phi)
  double var;   // sigma_G^2
};

GainAsymptotics gain_asymptotic_params(double theta, double phi);

}  // namespace seqcert
