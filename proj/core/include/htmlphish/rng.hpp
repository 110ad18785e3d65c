#pragma once

#include <cstddef>
#include <cstdint>

namespace htmlphish::nn {

// SplitMix64: a tiny, fully specified generator, so the same seed yields the
// same stream on every platform. Derived streams come from split()/fork().
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  // Child stream; advances this generator once.
  Rng split() { return Rng(mix(next_u64())); }
  // Child stream keyed by `key`; leaves this generator untouched.
  Rng fork(std::uint64_t key) const;

  std::uint64_t state() const { return state_; }

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t state_;
};

}  // namespace htmlphish::nn
