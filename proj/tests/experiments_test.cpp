#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "aloha/experiments.hpp"

namespace aloha {
namespace {

TEST(RunSweep, SkipsCombinationsWithoutContention) {
  const auto rows = run_sweep({3, 4, 6}, {4}, {1, 2});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].n_users, 6);
  EXPECT_EQ(rows[0].deadline, 1);
  EXPECT_EQ(rows[1].deadline, 2);
}

TEST(RunSweep, OrderedByMprThenDeadlineThenPopulation) {
  const auto rows = run_sweep({8, 9}, {2, 3}, {1, 4});
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    EXPECT_TRUE(std::tie(a.mpr, a.deadline, a.n_users) < std::tie(b.mpr, b.deadline, b.n_users));
  }
}

TEST(RunSweep, OptimumShapeAcrossGrid) {
  const auto rows = run_sweep({6, 10, 20, 40}, {2, 5}, {1, 10});
  for (const auto& r : rows) {
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.abs_diff, 1e-6) << r.n_users << ' ' << r.mpr << ' ' << r.deadline;
  }
  // Fixed M and D: more users means each transmits less often.
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].mpr == rows[i - 1].mpr && rows[i].deadline == rows[i - 1].deadline) {
      EXPECT_LT(rows[i].tau_opt, rows[i - 1].tau_opt);
    }
  }
  // Fixed N and D: a stronger receiver never hurts.
  for (int n : {6, 10, 20, 40}) {
    for (int d : {1, 10}) {
      EXPECT_LT(solve_optimal_tau({n, 2, d}).sdp_max, solve_optimal_tau({n, 5, d}).sdp_max);
    }
  }
}

TEST(RunReplications, SeedsAdvancePerReplication) {
  const ChannelConfig cfg(6, 2, 3);
  const auto s = run_replications(cfg, TxProbability(0.25), 5000, 3, 40);
  ASSERT_EQ(s.runs.size(), 3u);
  for (int r = 0; r < 3; ++r) {
    EXPECT_EQ(s.runs[r].seed, 40u + r);
    const auto alone = run_stationary(cfg, TxProbability(0.25), 5000, 40 + r);
    EXPECT_EQ(s.runs[r].tally.delivered, alone.tally.delivered);
  }
  double sum = 0.0;
  for (const auto& run : s.runs) sum += *run.pooled_sdp();
  EXPECT_DOUBLE_EQ(s.mean, sum / 3);
  EXPECT_GT(s.std_err, 0.0);
  EXPECT_DOUBLE_EQ(s.analytic, compute_sdp(cfg, TxProbability(0.25)));
  EXPECT_DOUBLE_EQ(s.z_score, (s.mean - s.analytic) / s.std_err);
}

TEST(RunReplications, SilentUsersGiveZero) {
  const auto s = run_replications({5, 2, 2}, TxProbability(0.0), 1000, 2, 1);
  EXPECT_EQ(s.mean, 0.0);
  EXPECT_EQ(s.std_err, 0.0);
  EXPECT_EQ(s.z_score, 0.0);
  EXPECT_THROW(run_replications({5, 2, 2}, TxProbability(0.1), 10, 0, 1),
               std::invalid_argument);
}

TEST(RunReplications, MatchesAnalyticAtOptimum) {
  const ChannelConfig cfg(20, 5, 5);
  const auto s = run_replications(cfg, solve_optimal_tau(cfg).tau_opt, 200000, 8, 3);
  EXPECT_LE(std::abs(s.z_score), 4.0);
}

TEST(Csv, SweepAndSimulateLayouts) {
  std::ostringstream sweep;
  write_sweep_csv(sweep, run_sweep({2}, {1}, {1}));
  EXPECT_EQ(sweep.str().substr(0, sweep.str().find('\n')),
            "N,M,D,tau_opt,sdp_max,oracle_tau,oracle_sdp,abs_diff");
  EXPECT_EQ(sweep.str().substr(sweep.str().find('\n') + 1, 17), "2,1,1,0.5,0.25,0.");

  std::ostringstream sim;
  write_simulate_csv(sim, run_replications({3, 1, 2}, TxProbability(0.0), 10, 1, 1));
  EXPECT_EQ(sim.str(),
            "row,replication,user,completed,succeeded,sdp,mean,std_err,analytic,z_score\n"
            "user,0,0,5,0,0,,,,\n"
            "user,0,1,5,0,0,,,,\n"
            "user,0,2,5,0,0,,,,\n"
            "aggregate,,,,,,0,0,0,0\n");
}

}  // namespace
}  // namespace aloha
