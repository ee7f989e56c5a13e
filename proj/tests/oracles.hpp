#pragma once

// Independent reference computations for tests: exact rational arithmetic
// and 50-digit floats from Boost.Multiprecision, quantiles from Boost.Math.

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;
using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Int binomial(unsigned n, unsigned k) {
  Int c = 1;
  for (unsigned i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

inline double log_binomial(unsigned n, unsigned k) {
  return static_cast<double>(log(Big(binomial(n, k))));
}

/// -log P(Binomial(n, num/den) >= k), summed exactly over rationals.
inline double neg_log_upper_tail(unsigned n, unsigned k, unsigned num, unsigned den) {
  Rational p(num, den);
  Rational q = 1 - p;
  Rational tail = 0;
  for (unsigned i = k; i <= n; ++i) {
    Rational term = Rational(binomial(n, i));
    for (unsigned j = 0; j < i; ++j) term *= p;
    for (unsigned j = i; j < n; ++j) term *= q;
    tail += term;
  }
  return static_cast<double>(-log(Big(tail)));
}

/// -nt log t - n(1-t) log(1-t) - log C(n, k) - log(n+1)/2 at 50 digits.
inline double entropy_correction(unsigned n, unsigned k) {
  Big nb(n);
  Big kb(k);
  Big result = -log(Big(binomial(n, k))) - log(nb + 1) / 2;
  if (k > 0) result -= kb * log(kb / nb);
  if (k < n) result -= (nb - kb) * log((nb - kb) / nb);
  return static_cast<double>(result);
}

/// x such that the standard normal upper tail at x equals exp(-alpha).
inline double normal_tail_quantile(double alpha) {
  boost::math::normal_distribution<double> nd;
  return boost::math::quantile(boost::math::complement(nd, std::exp(-alpha)));
}

/// Classical Clopper-Pearson interval at total level a.
inline std::pair<double, double> clopper_pearson(unsigned n, unsigned k, double a) {
  const double lo = k == 0 ? 0.0 : boost::math::ibeta_inv(double(k), double(n - k + 1), a / 2);
  const double hi = k == n ? 1.0 : boost::math::ibeta_inv(double(k + 1), double(n - k), 1 - a / 2);
  return {lo, hi};
}

}  // namespace oracle
