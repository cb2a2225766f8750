#pragma once

#include <cstdint>
#include <random>

namespace edcafair::sim {

/// Seeded pseudo-random stream.
///
/// Only the raw mt19937_64 engine is used; the distributions are implemented
/// here so that draw sequences do not depend on the standard library vendor.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform integer in [lo, hi]. Throws std::invalid_argument if lo > hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Exponentially distributed value with the given mean.
  double exponential(double mean);

  /// True with probability p (p <= 0 never, p >= 1 always).
  bool bernoulli(double p);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace edcafair::sim
