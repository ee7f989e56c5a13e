#include "seqcert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "seqcert/pvalues.hpp"

namespace seqcert {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double ratio(Count k, Count n) { return static_cast<double>(k) / static_cast<double>(n); }

void require_interior(Count n, Count k) {
  if (n < 2 || k == 0 || k >= n) throw DomainError("need 1 <= k <= n-1");
}

void require_above(Count n, Count k, double phi, bool strict) {
  require_interior(n, k);
  require_open_probability(phi, "phi");
  const double t = ratio(k, n);
  if (strict ? !(phi < t) : !(phi <= t)) {
    throw DomainError(strict ? "need phi < k/n" : "need phi <= k/n");
  }
}

}  // namespace

LogPGap LogPGap::compute(Count n, Count k, double phi) {
  const double ch = log_p_ch(n, k, phi).unclamped();
  return {ch, log_p_pbr(n, k, phi).unclamped() - ch, log_p_exact(n, k, phi).unclamped() - ch};
}

MillsArgument MillsArgument::of(Count n, double t, double phi) {
  require_open_probability(phi, "phi");
  return {std::sqrt(static_cast<double>(n) / (phi * (1.0 - phi))) * (t - phi)};
}

double tail_expansion_slack(Count n, double t, double phi) {
  require_open_probability(phi, "phi");
  const double first =
      (t - phi) * std::sqrt(std::numbers::pi * static_cast<double>(n) / (8.0 * phi * (1.0 - phi)));
  return std::min(first, 1.0);
}

BoundInterval hn_interval(Count n, Count k) {
  require_interior(n, k);
  const double nd = static_cast<double>(n);
  const double t = ratio(k, n);
  const double base = 0.5 * std::log(kTwoPi * t * (1.0 - t)) - 0.5 * std::log1p(1.0 / nd);
  return {base, base + 1.0 / (12.0 * nd * t * (1.0 - t))};
}

BoundInterval pbr_minus_ch_interval(Count n, Count k, double phi) {
  require_above(n, k, phi, false);
  return hn_interval(n, k).shifted(-0.5 * std::log1p(static_cast<double>(n)));
}

BoundInterval exact_minus_ch_interval(Count n, Count k, double phi) {
  require_above(n, k, phi, true);
  const double nd = static_cast<double>(n);
  const double t = ratio(k, n);
  const double d = t - phi;
  const double centre = 0.5 * std::log(nd) -
                        std::log((1.0 - phi) / d * std::sqrt(t / (kTwoPi * (1.0 - t))));
  const double lower = -tail_expansion_slack(n, t, phi) / (nd * d);
  const double upper = phi * (1.0 - phi) / (d * d * nd) + 1.0 / (12.0 * nd * t * (1.0 - t));
  return {centre + lower, centre + upper};
}

BoundInterval exact_minus_pbr_interval(Count n, Count k, double phi) {
  require_above(n, k, phi, true);
  const double nd = static_cast<double>(n);
  const double t = ratio(k, n);
  const double y = mills_ratio(MillsArgument::of(n, t, phi).value);
  const double centre = std::log1p(nd) - std::log(t * std::sqrt((1.0 - phi) / phi)) -
                        std::log(std::sqrt(nd) * y);
  const double lower = -tail_expansion_slack(n, t, phi) / (nd * (t - phi));
  return {centre + lower, centre};
}

GapAsymptotics gap_asymptotic_params(double theta, double phi) {
  require_open_probability(theta, "theta");
  require_open_probability(phi, "phi");
  if (!(phi < theta)) throw DomainError("need phi < theta");
  const double v = theta * (1.0 - theta);
  GapAsymptotics g{};
  g.mean_pbr = 0.5 * std::log(kTwoPi * v);
  g.var_pbr = (1.0 - 2.0 * theta) * (1.0 - 2.0 * theta) / (4.0 * v);
  g.mean_exact = std::log((theta - phi) / (1.0 - phi) * std::sqrt(kTwoPi * (1.0 - theta) / theta));
  const double num = theta * (1.0 - 2.0 * theta) + phi;
  g.var_exact = num * num / (4.0 * (theta - phi) * (theta - phi) * v);
  g.pbr_excluded = theta == 0.5;
  g.exact_excluded = phi == theta * (2.0 * theta - 1.0);
  return g;
}

GainAsymptotics gain_asymptotic_params(double theta, double phi) {
  require_open_probability(theta, "theta");
  require_open_probability(phi, "phi");
  if (!(phi < theta)) throw DomainError("need phi < theta");
  const double slope = std::log(theta / (1.0 - theta) * (1.0 - phi) / phi);
  return {kl_bernoulli(theta, phi), theta * (1.0 - theta) * slope * slope};
}

}  // namespace seqcert
