#pragma once

// Distributed population estimator and transmission-probability tuner.
//
// A tagged user counts, over an update interval of L slots, the slots in which
// it stays silent and exactly i others transmit, for i in
// {i1-1, i1, i2-1, i2}. With Y ~ Binomial(N-1, tau),
//
//   P(Y=i1) P(Y=i2-1) / (P(Y=i2) P(Y=i1-1)) = i2 (N - i1) / (i1 (N - i2)),
//
// independent of tau, so the measured count ratio identifies N. The ratio is
// smoothed by an EMA, inverted to an integer N estimate, and the optimal tau
// for that estimate is used during the next interval.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "aloha/analytic.hpp"
#include "aloha/sim.hpp"

namespace aloha {

struct EstimatorConfig {
  int interval_len = 1;       // L, slots per update interval
  double memory_factor = 0;   // EMA weight on the previous value
  int probe_low = 1;          // i1
  int probe_high = 2;         // i2
  int n_max = 2;              // upper bound on the population, also N_0
  int mpr = 1;                // M
  int deadline = 1;           // D

  void validate() const {
    if (interval_len < 1) throw std::invalid_argument("interval length must be >= 1");
    if (!(memory_factor >= 0.0 && memory_factor <= 1.0)) {
      throw std::invalid_argument("memory factor must lie in [0, 1]");
    }
    if (!(1 <= probe_low && probe_low < probe_high && probe_high <= mpr)) {
      throw std::invalid_argument("probe indices must satisfy 1 <= i1 < i2 <= M");
    }
    if (mpr >= n_max) throw std::invalid_argument("need M < N_max");
    if (n_max > kMaxUsers) throw std::invalid_argument("N_max exceeds population cap");
    if (deadline < 1) throw std::invalid_argument("deadline must be >= 1");
  }

  /// Ratio i2(N-i1)/(i1(N-i2)) for population N.
  double ratio_for(int n) const {
    return static_cast<double>(probe_high) * (n - probe_low) /
           (static_cast<double>(probe_low) * (n - probe_high));
  }

  /// Smallest admissible ratio, attained at N = N_max.
  double mu_floor() const { return ratio_for(n_max); }

  /// Largest admissible ratio, attained at N = M + 1.
  double mu_cap() const { return ratio_for(mpr + 1); }
};

/// Inverse of EstimatorConfig::ratio_for, before rounding:
///   N = i2 (i2 - i1) / (i1 mu - i2) + i2.
inline double population_from_ratio(int probe_low, int probe_high, double mu) {
  return static_cast<double>(probe_high) * (probe_high - probe_low) /
             (probe_low * mu - probe_high) +
         probe_high;
}

/// Nearest integer, halves rounded away from zero.
inline int nearest_integer(double x) { return static_cast<int>(std::lround(x)); }

struct EstimatorState {
  // Interval counters for i1-1, i1, i2-1, i2, in that order.
  std::array<std::uint64_t, 4> counters{};
  double mu_filtered = 0.0;   // mu_n
  double mu_raw_prev = 0.0;   // previous (safeguarded) raw measurement
  int n_est = 0;
  TxProbability tau_current;
  std::uint64_t interval_index = 0;
};

inline EstimatorState init_state(const EstimatorConfig& cfg) {
  cfg.validate();
  EstimatorState s;
  s.n_est = cfg.n_max;
  s.mu_filtered = s.mu_raw_prev = cfg.mu_floor();
  s.tau_current =
      solve_optimal_tau(ChannelConfig(cfg.n_max, cfg.mpr, cfg.deadline)).tau_opt;
  return s;
}

/// Counts a slot in which the tagged user was silent. Its total transmitter
/// count is then exactly the number of other transmitters.
inline void observe_slot(const EstimatorConfig& cfg, EstimatorState& s,
                         const SlotObservation& obs) {
  if (obs.tagged_transmitted) return;
  const int k = obs.total_transmitters;
  s.counters[0] += k == cfg.probe_low - 1;
  s.counters[1] += k == cfg.probe_low;
  s.counters[2] += k == cfg.probe_high - 1;
  s.counters[3] += k == cfg.probe_high;
}

/// Closes the current interval: safeguarded ratio measurement, EMA, new
/// population estimate and the matching optimal tau. Counters are reset.
inline void end_interval(const EstimatorConfig& cfg, EstimatorState& s) {
  const auto& a = s.counters;
  const double denom = static_cast<double>(a[3]) * static_cast<double>(a[0]);
  double raw = denom == 0.0
                   ? s.mu_raw_prev
                   : static_cast<double>(a[1]) * static_cast<double>(a[2]) / denom;
  raw = std::clamp(raw, cfg.mu_floor(), cfg.mu_cap());

  const double delta = cfg.memory_factor;
  s.mu_filtered = delta * s.mu_filtered + (1.0 - delta) * raw;
  s.mu_filtered = std::clamp(s.mu_filtered, cfg.mu_floor(), cfg.mu_cap());
  s.mu_raw_prev = raw;

  const int n = nearest_integer(
      population_from_ratio(cfg.probe_low, cfg.probe_high, s.mu_filtered));
  s.n_est = std::clamp(n, cfg.mpr + 1, cfg.n_max);
  s.tau_current =
      solve_optimal_tau(ChannelConfig(s.n_est, cfg.mpr, cfg.deadline)).tau_opt;
  s.counters = {};
  ++s.interval_index;
}

}  // namespace aloha
