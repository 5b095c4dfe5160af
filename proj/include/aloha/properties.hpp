#pragma once

// Numerical checks of the structural facts behind the solver: slope bounds on
// H1 and H2, the T(tau) identity, the binomial telescoping identity, the W(x)
// bound, monotonicity and sign pattern of the fixed-point map, and
// agreement with the brute-force oracle. Each check sweeps a grid of
// (N, M, D, tau) and reports the worst case.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "aloha/analytic.hpp"
#include "aloha/oracle.hpp"

namespace aloha {

struct VerifyGrid {
  std::vector<double> taus;  // interior points of (0, 1)
  std::vector<int> populations;
  int max_mpr = 8;  // M runs over 1..min(max_mpr, N-1)
  std::vector<int> deadlines;

  double identity_tol = 1e-12;
  double fd_step = 1e-6;
  double fd_rel_tol = 1e-5;
  double slope_margin = 1e-4;
  double oracle_tau_tol = 1e-6;

  static VerifyGrid standard() {
    VerifyGrid g;
    for (int k = 1; k <= 99; ++k) g.taus.push_back(k / 100.0);
    g.populations = {2, 5, 10, 50};
    g.deadlines = {1, 5, 20};
    return g;
  }
};

struct PropertyCheck {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  std::string worst;  // description of the first failing or worst case
};

namespace detail {

// Exact-in-double binomial coefficient for the small n used by the checks.
inline double choose(int n, int k) {
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return c;
}

inline double direct_pmf(int n, int i, double p) {
  return choose(n, i) * std::pow(p, i) * std::pow(1.0 - p, n - i);
}

inline std::string describe(const ChannelConfig& c, double tau, double value) {
  std::ostringstream os;
  os.precision(12);
  os << "N=" << c.n_users << " M=" << c.mpr << " D=" << c.deadline
     << " tau=" << tau << " value=" << value;
  return os.str();
}

template <class F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

class Recorder {
 public:
  explicit Recorder(std::string name) { check_.name = std::move(name); }

  // Records one case; `badness` ranks failures, larger is worse.
  void record(bool ok, double badness, const std::string& what) {
    ++check_.cases;
    if (!ok && (check_.passed || badness > worst_badness_)) {
      check_.passed = false;
      worst_badness_ = badness;
      check_.worst = what;
    }
  }

  PropertyCheck done() && { return std::move(check_); }

 private:
  PropertyCheck check_;
  double worst_badness_ = 0.0;
};

template <class F>
void for_each_config(const VerifyGrid& g, F&& f) {
  for (int n : g.populations) {
    for (int m = 1; m <= std::min(g.max_mpr, n - 1); ++m) {
      for (int d : g.deadlines) f(ChannelConfig(n, m, d));
    }
  }
}

}  // namespace detail

inline std::vector<PropertyCheck> run_property_suite(const VerifyGrid& g) {
  using detail::describe;
  using detail::Recorder;
  std::vector<PropertyCheck> out;
  const double h = g.fd_step;

  {
    Recorder r("sdp_bounds");
    detail::for_each_config(g, [&](const ChannelConfig& c) {
      for (double t : g.taus) {
        const double p = compute_sdp(c, TxProbability(t));
        r.record(p >= 0.0 && p <= 1.0, std::abs(p), describe(c, t, p));
      }
      const double p0 = compute_sdp(c, TxProbability(0.0));
      const double p1 = compute_sdp(c, TxProbability(1.0));
      r.record(p0 == 0.0 && p1 == 0.0, std::max(p0, p1), describe(c, 0.0, p0 + p1));
    });
    out.push_back(std::move(r).done());
  }

  {
    Recorder r("sdp_monotone_in_deadline");
    detail::for_each_config(g, [&](const ChannelConfig& c) {
      const ChannelConfig next(c.n_users, c.mpr, c.deadline + 1);
      for (double t : g.taus) {
        const double drop = compute_sdp(c, TxProbability(t)) -
                            compute_sdp(next, TxProbability(t));
        r.record(drop <= 0.0, drop, describe(c, t, drop));
      }
    });
    out.push_back(std::move(r).done());
  }

  {
    Recorder r("derivative_matches_finite_difference");
    detail::for_each_config(g, [&](const ChannelConfig& c) {
      auto p = [&](double t) { return compute_sdp(c, TxProbability(t)); };
      const int n = c.n_users;
      const int d = c.deadline;
      for (double t : g.taus) {
        const double exact = sdp_derivative(c, t);
        const double fd = detail::central_difference(p, t, h);
        // Near the critical point P' cancels to zero, so the error is
        // measured against the larger of |P'| and the summed magnitudes of
        // the terms that cancel.
        const double tail = std::pow(1.0 - t, d);
        const double terms = ((1.0 - tail) * f2(c, t) +
                              ((n - 1) + (n + d - 1) * tail) * t * f1(c, t)) /
                             (t * (1.0 - t));
        const double rel = std::abs(fd - exact) / std::max(std::abs(exact), terms);
        r.record(rel <= g.fd_rel_tol, rel, describe(c, t, rel));
      }
    });
    out.push_back(std::move(r).done());
  }

  {
    Recorder r("localization_derivative_positive_left_of_interval");
    detail::for_each_config(g, [&](const ChannelConfig& c) {
      const double lo = lower_bound_tau(c.n_users, c.deadline);
      for (double t : g.taus) {
        if (t >= lo - 1e-9) break;
        const double dp = sdp_derivative(c, t);
        r.record(dp > 0.0, -dp, describe(c, t, dp));
      }
      const double opt = solve_optimal_tau(c).tau_opt.value();
      r.record(opt >= lo && opt < 1.0, lo - opt, describe(c, opt, lo));
    });
    out.push_back(std::move(r).done());
  }

  {
    // 0 <= H1' < N-1, with H1' identically zero for M = 1.
    Recorder r("h1_slope_bounds");
    detail::for_each_config(g, [&](const ChannelConfig& c) {
      auto f = [&](double t) { return h1(c, t); };
      const double cap = c.n_users - 1;
      for (double t : g.taus) {
        const double s = detail::central_difference(f, t, h);
        const bool ok = c.mpr == 1 ? s == 0.0
                                   : s > -g.slope_margin && s < cap + g.slope_margin;
        r.record(ok, std::max(-s, s - cap), describe(c, t, s));
      }
    });
    out.push_back(std::move(r).done());
  }

  {
    Recorder r("h2_slope_exceeds_n_minus_1");
    detail::for_each_config(g, [&](const ChannelConfig& c) {
      auto f = [&](double t) { return h2(c, t); };
      const double cap = c.n_users - 1;
      for (double t : g.taus) {
        const double s = detail::central_difference(f, t, h);
        r.record(s > cap - g.slope_margin, cap - s, describe(c, t, s));
      }
    });
    out.push_back(std::move(r).done());
  }

  {
    Recorder r("t_ratio_minus_one_equals_h1");
    detail::for_each_config(g, [&](const ChannelConfig& c) {
      for (double t : g.taus) {
        const double err = std::abs(aux_t_ratio(c, t) - 1.0 - h1(c, t));
        r.record(err <= g.identity_tol, err, describe(c, t, err));
      }
    });
    out.push_back(std::move(r).done());
  }

  {
    // sum_{i=M}^{N-1} (i - (N-1)tau) C(N-1,i) tau^i (1-tau)^(N-1-i)
    //   = C(N-1,M-1) (N-M) tau^M (1-tau)^(N-M)
    Recorder r("binomial_telescoping_identity");
    detail::for_each_config(g, [&](const ChannelConfig& c) {
      const int n = c.n_users;
      const int m = c.mpr;
      for (double t : g.taus) {
        double lhs = 0.0;
        for (int i = m; i <= n - 1; ++i) {
          lhs += (i - (n - 1) * t) * detail::direct_pmf(n - 1, i, t);
        }
        const double rhs = detail::choose(n - 1, m - 1) * (n - m) *
                           std::pow(t, m) * std::pow(1.0 - t, n - m);
        const double err = std::abs(lhs - rhs);
        r.record(err <= g.identity_tol, err, describe(c, t, err));
      }
    });
    out.push_back(std::move(r).done());
  }

  {
    // W(x) < 1 only holds strictly for D >= 2; D = 1 gives W = 1.
    Recorder r("w_below_one");
    for (int d : g.deadlines) {
      if (d < 2) continue;
      for (double x : g.taus) {
        const double w = aux_w(d, x);
        r.record(w < 1.0 + g.identity_tol, w - 1.0,
                 "D=" + std::to_string(d) + " x=" + std::to_string(x) +
                     " W=" + std::to_string(w));
      }
    }
    out.push_back(std::move(r).done());
  }

  {
    Recorder r("g_increasing");
    detail::for_each_config(g, [&](const ChannelConfig& c) {
      auto f = [&](double x) { return aux_g(c, x); };
      for (double x : g.taus) {
        const double s = detail::central_difference(f, x, h);
        r.record(s > -g.slope_margin, -s, describe(c, x, s));
      }
    });
    out.push_back(std::move(r).done());
  }

  {
    // g(x) > x left of the optimum and g(x) < x right of it. For M > 1 the
    // image also stays on the same side of tau*, which is what makes the
    // iteration converge monotonically.
    Recorder r("g_sign_pattern");
    detail::for_each_config(g, [&](const ChannelConfig& c) {
      const double lo = lower_bound_tau(c.n_users, c.deadline);
      const double opt = solve_optimal_tau(c).tau_opt.value();
      for (double x : g.taus) {
        if (x <= lo || std::abs(x - opt) < 1e-9) continue;
        const double gx = aux_g(c, x);
        const bool bracketed = c.mpr == 1 || (x < opt ? gx < opt : opt < gx);
        const bool ok = (x < opt ? x < gx : gx < x) && bracketed;
        r.record(ok, std::abs(gx - x), describe(c, x, gx));
      }
    });
    out.push_back(std::move(r).done());
  }

  {
    Recorder r("solver_matches_oracle");
    detail::for_each_config(g, [&](const ChannelConfig& c) {
      const auto s = solve_optimal_tau(c);
      const auto o = grid_search_oracle(c);
      const double err = std::abs(s.tau_opt.value() - o.tau);
      r.record(s.converged && err <= g.oracle_tau_tol, err,
               describe(c, s.tau_opt.value(), err));
    });
    out.push_back(std::move(r).done());
  }

  return out;
}

}  // namespace aloha
