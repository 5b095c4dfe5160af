#pragma once

// Stationary experiments: optimum sweeps over (N, M, D) and replicated
// fixed-tau simulations, plus their CSV layouts.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <vector>

#include "aloha/analytic.hpp"
#include "aloha/csv.hpp"
#include "aloha/oracle.hpp"
#include "aloha/sim.hpp"

namespace aloha {

struct SweepRow {
  int n_users;
  int mpr;
  int deadline;
  double tau_opt;
  double sdp_max;
  double oracle_tau;
  double oracle_sdp;
  double abs_diff;  // |tau_opt - oracle_tau|
  bool converged;
};

/// Solver and oracle for every combination with M < N; other combinations
/// are skipped. Rows are ordered by M, then D, then N.
inline std::vector<SweepRow> run_sweep(const std::vector<int>& populations,
                                       const std::vector<int>& mprs,
                                       const std::vector<int>& deadlines) {
  std::vector<SweepRow> rows;
  for (int m : mprs) {
    for (int d : deadlines) {
      for (int n : populations) {
        if (m >= n) continue;
        const ChannelConfig cfg(n, m, d);
        const auto s = solve_optimal_tau(cfg);
        const auto o = grid_search_oracle(cfg);
        rows.push_back({n, m, d, s.tau_opt.value(), s.sdp_max, o.tau, o.sdp,
                        std::abs(s.tau_opt.value() - o.tau), s.converged});
      }
    }
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  csv::Writer w(os);
  for (const char* h : {"N", "M", "D", "tau_opt", "sdp_max", "oracle_tau",
                        "oracle_sdp", "abs_diff"}) {
    w.field(h);
  }
  w.end_row();
  for (const auto& r : rows) {
    w.field(r.n_users).field(r.mpr).field(r.deadline).field(r.tau_opt)
        .field(r.sdp_max).field(r.oracle_tau).field(r.oracle_sdp).field(r.abs_diff);
    w.end_row();
  }
}

struct ReplicationSummary {
  ChannelConfig cfg;
  TxProbability tau;
  std::vector<SimResult> runs;
  double mean = 0.0;     // mean over runs of the pooled SDP
  double std_err = 0.0;  // sample std. dev. of run means / sqrt(runs)
  double analytic = 0.0;
  double z_score = 0.0;
};

/// `reps` independent stationary runs; run r uses seed `seed + r`.
///
/// The standard error comes from the spread between runs. Packets of
/// different users share slots and are correlated, so the plain binomial
/// error over pooled packets would understate it. With a single run the
/// binomial error is used.
inline ReplicationSummary run_replications(const ChannelConfig& cfg,
                                           TxProbability tau, std::uint64_t slots,
                                           int reps, std::uint64_t seed) {
  if (reps < 1) throw std::invalid_argument("need at least one replication");
  ReplicationSummary out{cfg, tau, {}, 0.0, 0.0, compute_sdp(cfg, tau), 0.0};
  std::vector<double> means;
  std::uint64_t completed = 0;
  for (int r = 0; r < reps; ++r) {
    out.runs.push_back(run_stationary(cfg, tau, slots, seed + r));
    means.push_back(out.runs.back().pooled_sdp().value_or(0.0));
    completed += out.runs.back().tally.completed();
  }
  double sum = 0.0;
  for (double m : means) sum += m;
  out.mean = sum / reps;
  if (reps > 1) {
    double ss = 0.0;
    for (double m : means) ss += (m - out.mean) * (m - out.mean);
    out.std_err = std::sqrt(ss / (reps - 1) / reps);
  } else if (completed > 0) {
    out.std_err = std::sqrt(out.mean * (1.0 - out.mean) / completed);
  }
  const double diff = out.mean - out.analytic;
  if (out.std_err > 0.0) {
    out.z_score = diff / out.std_err;
  } else {
    out.z_score = diff == 0.0 ? 0.0 : INFINITY;
  }
  return out;
}

/// Per-user rows (row = "user") followed by one aggregate row.
inline void write_simulate_csv(std::ostream& os, const ReplicationSummary& s) {
  csv::Writer w(os);
  for (const char* h : {"row", "replication", "user", "completed", "succeeded", "sdp",
                        "mean", "std_err", "analytic", "z_score"}) {
    w.field(h);
  }
  w.end_row();
  for (std::size_t r = 0; r < s.runs.size(); ++r) {
    const auto& run = s.runs[r];
    for (std::size_t u = 0; u < run.users.size(); ++u) {
      w.field("user").field(static_cast<std::uint64_t>(r)).field(static_cast<std::uint64_t>(u))
          .field(run.users[u].packets_completed).field(run.users[u].packets_succeeded)
          .field(run.per_user_sdp[u]).field("").field("").field("").field("");
      w.end_row();
    }
  }
  w.field("aggregate").field("").field("").field("").field("").field("")
      .field(s.mean).field(s.std_err).field(s.analytic).field(s.z_score);
  w.end_row();
}

}  // namespace aloha
