#pragma once

#include <cstdint>
#include <random>

namespace aloha {

/// Seeded random stream used by every simulation.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard (the 10000th draw from the default seed is 9981545732273789042),
/// and uniforms are formed from the top 53 bits, so a given seed yields the
/// same stream on every conforming platform. std::uniform_real_distribution is
/// avoided because its algorithm is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// True with probability p; never true for p = 0, always true for p = 1.
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace aloha
