#pragma once

#include <stdexcept>
#include <string>

namespace aloha {

// Upper bound on the population size accepted by ChannelConfig.
inline constexpr int kMaxUsers = 1000;

/// A per-slot transmission probability, always inside [0, 1].
class TxProbability {
 public:
  constexpr TxProbability() = default;

  explicit TxProbability(double value) : value_(value) {
    // NaN fails both comparisons and is rejected too.
    if (!(value >= 0.0 && value <= 1.0)) {
      throw std::domain_error("transmission probability outside [0, 1]: " +
                              std::to_string(value));
    }
  }

  constexpr double value() const { return value_; }

  friend constexpr bool operator==(TxProbability, TxProbability) = default;

 private:
  double value_ = 0.0;
};

/// Population size N, MPR capability M and delivery deadline D (in slots).
///
/// Construction enforces N >= 2, 1 <= M < N, D >= 1 and N <= kMaxUsers.
struct ChannelConfig {
  int n_users;
  int mpr;
  int deadline;

  ChannelConfig(int n, int m, int d) : n_users(n), mpr(m), deadline(d) {
    if (n < 2) throw std::invalid_argument("population must be at least 2");
    if (n > kMaxUsers) {
      throw std::invalid_argument("population exceeds cap of " +
                                  std::to_string(kMaxUsers));
    }
    if (m < 1 || m >= n) {
      throw std::invalid_argument("MPR capability must satisfy 1 <= M < N");
    }
    if (d < 1) throw std::invalid_argument("deadline must be at least 1 slot");
  }

  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

}  // namespace aloha
