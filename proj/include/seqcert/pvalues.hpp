#pragma once

// The three p-value bounds for n Bernoulli trials with k successes,
// tested against B_phi = {theta <= phi}. Everything is returned as -log p.

#include <string_view>

#include "seqcert/core.hpp"

namespace seqcert {

enum class TestKind { Exact, ChernoffHoeffding, PBR };

std::string_view to_string(TestKind kind);
/// Accepts "exact", "ch", "pbr" (case-sensitive) and the enum names.
TestKind parse_test_kind(std::string_view name);

/// theta_hat together with theta_max = max(theta_hat, phi).
struct ThetaMaxView {
  double theta_hat;
  double phi;
  double theta_max;

  static ThetaMaxView of(Count n, Count k, double phi);
};

/// Binomial upper tail sum_{i >= k} C(n,i) phi^i (1-phi)^(n-i), in -log form.
LogPValue log_p_exact(Count n, Count k, double phi);

/// Optimal Chernoff-Hoeffding bound: n KL(k/n | phi) when k/n >= phi, else 0.
LogPValue log_p_ch(Count n, Count k, double phi);

/// PBR bound max_{phi' <= phi} phi'^k (1-phi')^(n-k) (n+1) C(n,k).
/// The bound can exceed 1; see LogPValue::unclamped().
LogPValue log_p_pbr(Count n, Count k, double phi);

LogPValue log_p(TestKind kind, Count n, Count k, double phi);

}  // namespace seqcert
