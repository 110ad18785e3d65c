#include "htmlphish/rng.hpp"

#include <stdexcept>

namespace htmlphish::nn {

std::uint64_t Rng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix(state_);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: empty range");
  // Rejection keeps the result unbiased.
  const std::uint64_t limit = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= limit) return r % n;
  }
}

Rng Rng::fork(std::uint64_t key) const {
  return Rng(mix(state_ ^ mix(key + 0x9E3779B97F4A7C15ULL)));
}

}  // namespace htmlphish::nn
