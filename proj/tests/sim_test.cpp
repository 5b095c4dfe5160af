#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "aloha/analytic.hpp"
#include "aloha/sim.hpp"

namespace aloha {
namespace {

TEST(Rng, EngineMatchesStandardTestVector) {
  Rng rng(5489u);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next_u64();
  EXPECT_EQ(v, 9981545732273789042ull);
}

TEST(Rng, UniformStaysInHalfOpenUnitInterval) {
  Rng rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  EXPECT_FALSE(Rng(1).bernoulli(0.0));
  EXPECT_TRUE(Rng(1).bernoulli(1.0));
}

std::vector<UserState> users_with(std::initializer_list<double> probs) {
  std::vector<UserState> v;
  for (double p : probs) v.push_back(UserState{TxProbability(p)});
  return v;
}

TEST(StepSlot, LoneTransmitterSucceeds) {
  auto users = users_with({1.0});
  std::vector<UserSlotOutcome> out(1);
  Rng rng(3);
  EXPECT_EQ(step_slot(users, {1, 4}, rng, out), 1);
  EXPECT_EQ(out[0].fate, PacketFate::delivered);
  EXPECT_EQ(out[0].observation.success_count, 1);
  EXPECT_EQ(users[0].packets_succeeded, 1u);
  EXPECT_EQ(users[0].hol_age, 0);
}

TEST(StepSlot, MoreThanMTransmittersAllFail) {
  auto users = users_with({1.0, 1.0, 1.0});
  std::vector<UserSlotOutcome> out(3);
  Rng rng(3);
  step_slot(users, {2, 1}, rng, out);
  for (const auto& o : out) {
    EXPECT_EQ(o.fate, PacketFate::collided);
    EXPECT_EQ(o.observation.total_transmitters, 3);
    EXPECT_EQ(o.observation.success_count, 0);
  }
  for (const auto& u : users) {
    EXPECT_EQ(u.packets_completed, 1u);
    EXPECT_EQ(u.packets_succeeded, 0u);
  }
}

TEST(StepSlot, UpToMTransmittersAllSucceed) {
  auto users = users_with({1.0, 1.0, 0.0});
  std::vector<UserSlotOutcome> out(3);
  Rng rng(3);
  step_slot(users, {2, 5}, rng, out);
  EXPECT_EQ(out[0].fate, PacketFate::delivered);
  EXPECT_EQ(out[1].fate, PacketFate::delivered);
  EXPECT_EQ(out[2].fate, PacketFate::pending);
  EXPECT_FALSE(out[2].observation.tagged_transmitted);
  EXPECT_EQ(out[2].observation.total_transmitters, 2);
  EXPECT_EQ(out[2].observation.success_count, 2);
  EXPECT_EQ(users[2].hol_age, 1);
}

TEST(StepSlot, PacketExpiresAfterDSilentSlots) {
  auto users = users_with({0.0});
  std::vector<UserSlotOutcome> out(1);
  Rng rng(3);
  for (int s = 1; s <= 3; ++s) {
    step_slot(users, {1, 3}, rng, out);
    EXPECT_LT(users[0].hol_age, 3);
    EXPECT_EQ(out[0].fate, s == 3 ? PacketFate::expired : PacketFate::pending);
  }
  EXPECT_EQ(users[0].packets_completed, 1u);
  EXPECT_EQ(users[0].packets_succeeded, 0u);
}

TEST(RunStationary, SilentUsersOnlyExpire) {
  for (int d : {1, 3, 7}) {
    const auto r = run_stationary({6, 2, d}, TxProbability(0.0), 10000, 11);
    for (std::size_t u = 0; u < r.users.size(); ++u) {
      EXPECT_EQ(r.users[u].packets_completed, static_cast<std::uint64_t>(10000 / d));
      ASSERT_TRUE(r.per_user_sdp[u].has_value());
      EXPECT_EQ(*r.per_user_sdp[u], 0.0);
    }
  }
}

TEST(RunStationary, EmptyRunReportsAbsentSdp) {
  const auto r = run_stationary({4, 2, 5}, TxProbability(0.3), 0, 1);
  for (const auto& s : r.per_user_sdp) EXPECT_FALSE(s.has_value());
  EXPECT_FALSE(r.pooled_sdp().has_value());
}

TEST(RunStationary, SameSeedSameResult) {
  const ChannelConfig cfg(8, 3, 4);
  const auto a = run_stationary(cfg, TxProbability(0.17), 20000, 42);
  const auto b = run_stationary(cfg, TxProbability(0.17), 20000, 42);
  const auto c = run_stationary(cfg, TxProbability(0.17), 20000, 43);
  for (std::size_t u = 0; u < a.users.size(); ++u) {
    EXPECT_EQ(a.users[u].packets_completed, b.users[u].packets_completed);
    EXPECT_EQ(a.users[u].packets_succeeded, b.users[u].packets_succeeded);
  }
  EXPECT_EQ(a.tally.sent_at_age, b.tally.sent_at_age);
  EXPECT_NE(a.tally.delivered, c.tally.delivered);
}

TEST(RunStationary, SameSeedSameObservationStream) {
  auto run = [](std::uint64_t seed) {
    auto users = std::vector<UserState>(5, UserState{TxProbability(0.3)});
    std::vector<UserSlotOutcome> out(5);
    std::vector<int> counts;
    Rng rng(seed);
    for (int s = 0; s < 2000; ++s) counts.push_back(step_slot(users, {2, 3}, rng, out));
    return counts;
  };
  EXPECT_EQ(run(9), run(9));
}

// Packets leave the head at age k-1 with probability tau(1-tau)^(k-1) and
// expire with probability (1-tau)^D. Among transmissions the success rate is
// P(Y <= M-1). All three are checked to within 5 binomial standard errors.
TEST(RunStationary, HeadOfLineAndConditionalSuccessLaws) {
  const ChannelConfig cfg(10, 3, 5);
  const double tau = 0.2;
  const auto r = run_stationary(cfg, TxProbability(tau), 200000, 5);
  const double n = static_cast<double>(r.tally.completed());
  auto within = [](double observed, double p, double trials) {
    return std::abs(observed - p) <= 5.0 * std::sqrt(p * (1 - p) / trials);
  };
  for (int k = 0; k < cfg.deadline; ++k) {
    const double p = tau * std::pow(1 - tau, k);
    EXPECT_TRUE(within(r.tally.sent_at_age[k] / n, p, n)) << "age " << k;
  }
  EXPECT_TRUE(within(r.tally.expired / n, std::pow(1 - tau, cfg.deadline), n));

  const double sent = static_cast<double>(r.tally.delivered + r.tally.collided);
  EXPECT_TRUE(within(r.tally.delivered / sent, f1(cfg, tau), sent / cfg.n_users));
}

TEST(RunStationary, UsersAreSymmetric) {
  const ChannelConfig cfg(12, 4, 3);
  const auto r = run_stationary(cfg, TxProbability(0.15), 300000, 8);
  const double p = compute_sdp(cfg, TxProbability(0.15));
  for (std::size_t u = 0; u < r.users.size(); ++u) {
    const double n = static_cast<double>(r.users[u].packets_completed);
    EXPECT_NEAR(*r.per_user_sdp[u], p, 5 * std::sqrt(p * (1 - p) / n)) << "user " << u;
  }
}

TEST(RunStationary, TableConfigurationsAtOptimum) {
  const ChannelConfig d1(20, 5, 1);
  const auto r1 = run_stationary(d1, solve_optimal_tau(d1).tau_opt, 1'000'000, 1);
  EXPECT_NEAR(*r1.pooled_sdp(), 0.1357, 0.003);

  const ChannelConfig d20(20, 5, 20);
  const auto r20 = run_stationary(d20, solve_optimal_tau(d20).tau_opt, 1'000'000, 1);
  EXPECT_NEAR(*r20.pooled_sdp(), 0.8595, 0.005);
}

TEST(TheoreticalCheck, AgreesWithAnalyticValue) {
  const auto c = theoretical_check({10, 2, 5}, TxProbability(0.2), 1'000'000, 1);
  EXPECT_LE(std::abs(c.z_score), 4.0);
  EXPECT_DOUBLE_EQ(c.analytic, compute_sdp({10, 2, 5}, TxProbability(0.2)));

  const auto half = theoretical_check({2, 1, 1}, TxProbability(0.5), 1'000'000, 2);
  EXPECT_NEAR(half.empirical, 0.25, 0.002);
  EXPECT_NEAR(half.analytic, 0.25, 1e-15);
}

TEST(TheoreticalCheck, AlwaysTransmittingWithSingleReception) {
  const auto c = theoretical_check({3, 1, 2}, TxProbability(1.0), 1000, 1);
  EXPECT_EQ(c.analytic, 0.0);
  EXPECT_EQ(c.empirical, 0.0);
  EXPECT_EQ(c.z_score, 0.0);
}

}  // namespace
}  // namespace aloha
