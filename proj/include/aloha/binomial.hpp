#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace aloha {

/// P(Y = i) for Y ~ Binomial(n, p). 0^0 is taken as 1, so p = 0 and p = 1
/// give the degenerate distributions at 0 and n.
inline double binomial_pmf(int n, int i, double p) {
  if (n < 0 || i < 0 || i > n) {
    throw std::domain_error("binomial_pmf: need 0 <= i <= n");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("binomial_pmf: p outside [0, 1]");
  }
  if (p == 0.0) return i == 0 ? 1.0 : 0.0;
  if (p == 1.0) return i == n ? 1.0 : 0.0;
  const double log_choose =
      std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
  return std::exp(log_choose + i * std::log(p) + (n - i) * std::log1p(-p));
}

/// 1 - (1 - tau)^d without cancellation for small tau.
inline double one_minus_pow_complement(double tau, int d) {
  if (tau >= 1.0) return 1.0;
  return -std::expm1(d * std::log1p(-tau));
}

/// Weighted lower binomial sums
///
///   S_k = sum_{i=0}^{count-1} i^k C(n,i) tau^i (1-tau)^(n-i),  k = 0, 1, 2,
///
/// held as exp(log_scale) * {s0, s1, s2}. Terms are generated by the ratio
/// recurrence t_{i+1} = t_i * (n-i)/(i+1) * tau/(1-tau) in log space and
/// rescaled on the fly, so neither large n nor tau near 1 over- or
/// underflows. Ratios such as S_1/S_0 are therefore exact to rounding even
/// when S_0 itself is below the smallest double.
struct LowerBinomialSums {
  double log_scale = -std::numeric_limits<double>::infinity();
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;

  double mass() const { return s0 == 0.0 ? 0.0 : std::exp(log_scale) * s0; }
  double first() const { return s1 == 0.0 ? 0.0 : std::exp(log_scale) * s1; }
  double second() const { return s2 == 0.0 ? 0.0 : std::exp(log_scale) * s2; }
};

// Requires 0 < tau < 1 and 0 <= count <= n + 1.
inline LowerBinomialSums lower_binomial_sums(int n, int count, double tau) {
  LowerBinomialSums out;
  if (count <= 0) return out;
  const double log_odds = std::log(tau) - std::log1p(-tau);
  double log_term = n * std::log1p(-tau);
  out.log_scale = log_term;
  for (int i = 0; i < count; ++i) {
    if (i > 0) {
      log_term += std::log(static_cast<double>(n - i + 1) / i) + log_odds;
    }
    if (log_term > out.log_scale) {
      const double shrink = std::exp(out.log_scale - log_term);
      out.s0 *= shrink;
      out.s1 *= shrink;
      out.s2 *= shrink;
      out.log_scale = log_term;
    }
    const double w = std::exp(log_term - out.log_scale);
    out.s0 += w;
    out.s1 += i * w;
    out.s2 += static_cast<double>(i) * i * w;
  }
  return out;
}

}  // namespace aloha
