#pragma once

// Brute-force maximizer of the SDP, used as an independent check on the
// fixed-point solver. It only evaluates compute_sdp and never touches H1/H2.

#include <cmath>
#include <stdexcept>

#include "aloha/analytic.hpp"

namespace aloha {

struct ScalarMax {
  double x;
  double value;
};

/// Golden-section search for the maximum of a unimodal `f` on [lo, hi].
/// Stops once the bracket is narrower than `width`.
template <class F>
ScalarMax golden_section_maximize(F&& f, double lo, double hi, double width) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > width) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  const double x = 0.5 * (lo + hi);
  return {x, f(x)};
}

struct OracleResult {
  double tau;
  double sdp;
};

/// Uniform grid of `coarse_points` over [lower_bound_tau, 1), then golden
/// section on the two cells around the best grid point down to 1e-10.
inline OracleResult grid_search_oracle(const ChannelConfig& cfg,
                                       int coarse_points = 2000) {
  if (coarse_points < 1000) {
    throw std::invalid_argument("grid_search_oracle: need >= 1000 points");
  }
  const double lo = lower_bound_tau(cfg.n_users, cfg.deadline);
  const double step = (1.0 - lo) / coarse_points;
  auto sdp = [&](double t) { return compute_sdp(cfg, TxProbability(t)); };

  int best = 0;
  double best_val = sdp(lo);
  for (int k = 1; k < coarse_points; ++k) {
    const double v = sdp(lo + k * step);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  const double a = best == 0 ? lo : lo + (best - 1) * step;
  const double b = std::fmin(lo + (best + 1) * step, 1.0);
  const auto refined = golden_section_maximize(sdp, a, b, 1e-10);
  // The optimum for M = 1 sits exactly on the left end of the grid.
  if (best_val > refined.value) return {lo + best * step, best_val};
  return {refined.x, refined.value};
}

}  // namespace aloha
