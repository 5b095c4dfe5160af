#pragma once

// Closed-form quantities for slotted ALOHA on an M-user MPR channel with a
// per-packet delivery deadline, and the fixed-point solver for the
// transmission probability that maximizes the successful delivery
// probability (SDP).
//
// Notation used in comments: N users, MPR capability M, deadline D slots,
// common transmission probability tau, and Y ~ Binomial(N-1, tau) the number
// of other transmitters seen by a tagged user.

#include <cmath>
#include <stdexcept>

#include "aloha/binomial.hpp"
#include "aloha/channel.hpp"

namespace aloha {

namespace detail {

inline void require_open_unit(double x, const char* what) {
  if (!(x > 0.0 && x < 1.0)) {
    throw std::domain_error(std::string(what) + ": argument must lie in (0, 1)");
  }
}

inline void require_closed_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error(std::string(what) + ": argument must lie in [0, 1]");
  }
}

}  // namespace detail

/// f1(tau) = P(Y <= M-1).
inline double f1(const ChannelConfig& cfg, double tau) {
  detail::require_closed_unit(tau, "f1");
  if (tau == 0.0) return 1.0;
  if (tau == 1.0) return 0.0;  // only i = N-1 survives and M-1 < N-1
  return lower_binomial_sums(cfg.n_users - 1, cfg.mpr, tau).mass();
}

/// f2(tau) = sum_{i<M} i P(Y = i).
inline double f2(const ChannelConfig& cfg, double tau) {
  detail::require_closed_unit(tau, "f2");
  if (tau == 0.0 || tau == 1.0) return 0.0;
  return lower_binomial_sums(cfg.n_users - 1, cfg.mpr, tau).first();
}

/// Successful delivery probability
///   P_D(tau) = (1 - (1-tau)^D) * P(Y <= M-1).
inline double compute_sdp(const ChannelConfig& cfg, TxProbability tau) {
  const double t = tau.value();
  if (t == 0.0 || t == 1.0) return 0.0;
  const double p = one_minus_pow_complement(t, cfg.deadline) * f1(cfg, t);
  return p > 1.0 ? 1.0 : p;
}

/// H1 = f2 / f1, the mean of Y conditioned on Y <= M-1. Zero for M = 1.
inline double h1(const ChannelConfig& cfg, double tau) {
  detail::require_open_unit(tau, "h1");
  if (cfg.mpr == 1) return 0.0;
  const auto sums = lower_binomial_sums(cfg.n_users - 1, cfg.mpr, tau);
  return sums.s1 / sums.s0;
}

/// H2 = tau * (N + D - 1 - D / (1 - (1-tau)^D)). Tends to -1 as tau -> 0+.
inline double h2(const ChannelConfig& cfg, double tau) {
  detail::require_open_unit(tau, "h2");
  const int n = cfg.n_users;
  const int d = cfg.deadline;
  return tau * (n + d - 1 - d / one_minus_pow_complement(tau, d));
}

/// dP_D/dtau in the factored form
///   [(1-(1-tau)^D) f2 - (N-1 - (N+D-1)(1-tau)^D) tau f1] / (tau (1-tau)).
inline double sdp_derivative(const ChannelConfig& cfg, double tau) {
  detail::require_open_unit(tau, "sdp_derivative");
  const int n = cfg.n_users;
  const int d = cfg.deadline;
  const auto sums = lower_binomial_sums(n - 1, cfg.mpr, tau);
  const double tail = std::exp(d * std::log1p(-tau));
  const double bracket = one_minus_pow_complement(tau, d) * sums.s1 -
                         ((n - 1) - (n + d - 1) * tail) * tau * sums.s0;
  return std::exp(sums.log_scale) * bracket / (tau * (1.0 - tau));
}

/// Left end of the interval [1 - ((N-1)/(N-1+D))^(1/D), 1) that contains the
/// optimum. This is where H2 crosses zero.
inline double lower_bound_tau(int n_users, int deadline) {
  if (n_users < 2) throw std::invalid_argument("lower_bound_tau: N < 2");
  if (deadline < 1) throw std::invalid_argument("lower_bound_tau: D < 1");
  const double ratio =
      static_cast<double>(n_users - 1) / (n_users - 1 + deadline);
  return -std::expm1(std::log(ratio) / deadline);
}

/// Closed-form optimum for single-packet reception (M = 1).
inline TxProbability optimal_tau_spr(int n_users, int deadline) {
  return TxProbability(lower_bound_tau(n_users, deadline));
}

/// Fixed-point map g(x) = x (H1(x) + 1) / (H2(x) + 1). Its unique fixed point
/// in (0, 1) is the optimal transmission probability.
inline double aux_g(const ChannelConfig& cfg, double x) {
  detail::require_open_unit(x, "aux_g");
  return x * (h1(cfg, x) + 1.0) / (h2(cfg, x) + 1.0);
}

/// T(tau) = sum_{i=1}^{M} i^2 C(N,i) tau^i (1-tau)^(N-i)
///        / sum_{i=1}^{M} i   C(N,i) tau^i (1-tau)^(N-i).
/// Built over N trials (not N-1); T - 1 coincides with H1.
inline double aux_t_ratio(const ChannelConfig& cfg, double tau) {
  detail::require_open_unit(tau, "aux_t_ratio");
  const auto sums = lower_binomial_sums(cfg.n_users, cfg.mpr + 1, tau);
  return sums.s2 / sums.s1;
}

/// W(x) = D^2 x^2 (1-x)^(D-1) / (1 - (1-x)^D)^2. Equals 1 for D = 1 and is
/// below 1 on (0, 1) for D >= 2.
inline double aux_w(int deadline, double x) {
  detail::require_open_unit(x, "aux_w");
  if (deadline < 1) throw std::invalid_argument("aux_w: D < 1");
  const double denom = one_minus_pow_complement(x, deadline);
  const double numer = static_cast<double>(deadline) * deadline * x * x *
                       std::exp((deadline - 1) * std::log1p(-x));
  return numer / (denom * denom);
}

struct SolveOptions {
  double tolerance = 1e-12;
  int max_iter = 10'000;
};

struct SolveReport {
  TxProbability tau_opt;
  double sdp_max = 0.0;
  int iterations = 0;
  double residual = 0.0;  // |x_{n+1} - x_n| at the last step
  bool converged = false;
};

/// Optimal transmission probability for `cfg`.
///
/// M = 1 uses the closed form (zero iterations). For M > 1 the map aux_g is
/// iterated from the midpoint of (lower_bound_tau, 1) until successive
/// iterates differ by at most `opts.tolerance`. If that does not happen
/// within `opts.max_iter` steps the report comes back with converged = false
/// and the last iterate. sdp_max is always recomputed from compute_sdp.
inline SolveReport solve_optimal_tau(const ChannelConfig& cfg,
                                     SolveOptions opts = {}) {
  if (!(opts.tolerance > 0.0)) {
    throw std::invalid_argument("solve_optimal_tau: tolerance must be > 0");
  }
  if (opts.max_iter < 1) {
    throw std::invalid_argument("solve_optimal_tau: max_iter must be >= 1");
  }

  SolveReport report;
  if (cfg.mpr == 1) {
    report.tau_opt = optimal_tau_spr(cfg.n_users, cfg.deadline);
    report.converged = true;
  } else {
    const double lo = lower_bound_tau(cfg.n_users, cfg.deadline);
    double x = 0.5 * (lo + 1.0);
    for (int it = 1; it <= opts.max_iter; ++it) {
      const double next = aux_g(cfg, x);
      report.iterations = it;
      report.residual = std::abs(next - x);
      if (!(next > 0.0 && next < 1.0)) break;  // left the domain; give up
      x = next;
      if (report.residual <= opts.tolerance) {
        report.converged = true;
        break;
      }
    }
    report.tau_opt = TxProbability(std::fmin(std::fmax(x, 0.0), 1.0));
  }
  report.sdp_max = compute_sdp(cfg, report.tau_opt);
  return report;
}

}  // namespace aloha
