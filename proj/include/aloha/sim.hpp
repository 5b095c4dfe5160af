#pragma once

// Slot-synchronous Monte Carlo model of saturated slotted ALOHA on an M-user
// MPR channel with a per-packet delivery deadline.
//
// Per slot, every user transmits its head-of-line packet with its own
// probability. If k users transmit and k <= M all k packets are decoded,
// otherwise none is. A packet leaves the head after its single attempt
// (no acknowledgement, no retransmission) and is replaced immediately. A
// packet that sees D slots pass without being sent expires as a failure.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "aloha/analytic.hpp"
#include "aloha/channel.hpp"
#include "aloha/rng.hpp"

namespace aloha {

struct UserState {
  TxProbability tx_prob;
  int hol_age = 0;  // slots the current packet has waited at the head
  std::uint64_t packets_completed = 0;
  std::uint64_t packets_succeeded = 0;
};

struct SlotObservation {
  int total_transmitters = 0;
  bool tagged_transmitted = false;
  int success_count = 0;  // total_transmitters if <= M, else 0
};

enum class PacketFate : std::uint8_t { pending, delivered, collided, expired };

struct UserSlotOutcome {
  SlotObservation observation;
  PacketFate fate = PacketFate::pending;
  int departure_age = 0;  // head-of-line age when sent; valid if sent
};

struct SlotRules {
  int mpr;
  int deadline;
};

/// Advances every user by one slot. Bernoulli draws are taken from `rng` in
/// ascending user index. `out` must have the same length as `users`.
/// Returns the number of transmitters.
inline int step_slot(std::span<UserState> users, SlotRules rules, Rng& rng,
                     std::span<UserSlotOutcome> out) {
  if (out.size() != users.size()) {
    throw std::invalid_argument("step_slot: output span size mismatch");
  }
  int transmitters = 0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const bool tx = rng.bernoulli(users[i].tx_prob.value());
    out[i].observation.tagged_transmitted = tx;
    transmitters += tx;
  }
  const bool decoded = transmitters <= rules.mpr;
  const int successes = decoded ? transmitters : 0;

  for (std::size_t i = 0; i < users.size(); ++i) {
    UserState& u = users[i];
    UserSlotOutcome& o = out[i];
    o.observation.total_transmitters = transmitters;
    o.observation.success_count = successes;
    if (o.observation.tagged_transmitted) {
      o.fate = decoded ? PacketFate::delivered : PacketFate::collided;
      o.departure_age = u.hol_age;
      ++u.packets_completed;
      u.packets_succeeded += decoded;
      u.hol_age = 0;
    } else if (++u.hol_age == rules.deadline) {
      o.fate = PacketFate::expired;
      ++u.packets_completed;
      u.hol_age = 0;
    } else {
      o.fate = PacketFate::pending;
    }
  }
  return transmitters;
}

/// Pooled packet accounting over all users of a run.
struct PacketTally {
  std::vector<std::uint64_t> sent_at_age;  // index = head-of-line age, 0..D-1
  std::uint64_t delivered = 0;
  std::uint64_t collided = 0;
  std::uint64_t expired = 0;

  std::uint64_t completed() const { return delivered + collided + expired; }
};

struct SimResult {
  std::vector<std::optional<double>> per_user_sdp;  // empty when 0/0
  std::vector<UserState> users;
  PacketTally tally;
  std::uint64_t slots_run = 0;
  std::uint64_t seed = 0;

  /// Delivered / completed over all users, or nullopt with no completions.
  std::optional<double> pooled_sdp() const {
    const auto n = tally.completed();
    if (n == 0) return std::nullopt;
    return static_cast<double>(tally.delivered) / static_cast<double>(n);
  }
};

inline std::optional<double> empirical_sdp(const UserState& u) {
  if (u.packets_completed == 0) return std::nullopt;
  return static_cast<double>(u.packets_succeeded) /
         static_cast<double>(u.packets_completed);
}

/// All N users at a fixed probability `tau` for `slots` slots.
inline SimResult run_stationary(const ChannelConfig& cfg, TxProbability tau,
                                std::uint64_t slots, std::uint64_t seed) {
  SimResult res;
  res.seed = seed;
  res.users.assign(cfg.n_users, UserState{tau});
  res.tally.sent_at_age.assign(cfg.deadline, 0);
  std::vector<UserSlotOutcome> out(cfg.n_users);
  Rng rng(seed);
  const SlotRules rules{cfg.mpr, cfg.deadline};

  for (std::uint64_t s = 0; s < slots; ++s) {
    step_slot(res.users, rules, rng, out);
    for (const auto& o : out) {
      switch (o.fate) {
        case PacketFate::pending:
          break;
        case PacketFate::delivered:
          ++res.tally.delivered;
          ++res.tally.sent_at_age[o.departure_age];
          break;
        case PacketFate::collided:
          ++res.tally.collided;
          ++res.tally.sent_at_age[o.departure_age];
          break;
        case PacketFate::expired:
          ++res.tally.expired;
          break;
      }
    }
  }
  res.slots_run = slots;
  res.per_user_sdp.reserve(res.users.size());
  for (const auto& u : res.users) res.per_user_sdp.push_back(empirical_sdp(u));
  return res;
}

struct TheoreticalCheck {
  double empirical = 0.0;
  double analytic = 0.0;
  double z_score = 0.0;
  std::uint64_t completed = 0;
};

/// Runs run_stationary and compares the pooled empirical SDP with P_D(tau).
/// The z-score uses the binomial standard error sqrt(p(1-p)/n) over all
/// completed packets. If p is 0 or 1 it is 0 on an exact match and infinite
/// otherwise.
inline TheoreticalCheck theoretical_check(const ChannelConfig& cfg,
                                          TxProbability tau, std::uint64_t slots,
                                          std::uint64_t seed) {
  const auto sim = run_stationary(cfg, tau, slots, seed);
  TheoreticalCheck out;
  out.analytic = compute_sdp(cfg, tau);
  out.completed = sim.tally.completed();
  out.empirical = sim.pooled_sdp().value_or(0.0);
  const double var = out.analytic * (1.0 - out.analytic);
  const double diff = out.empirical - out.analytic;
  if (var > 0.0 && out.completed > 0) {
    out.z_score = diff / std::sqrt(var / static_cast<double>(out.completed));
  } else {
    out.z_score = diff == 0.0 ? 0.0 : INFINITY;
  }
  return out;
}

}  // namespace aloha
