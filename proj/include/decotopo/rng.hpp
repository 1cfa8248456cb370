#pragma once

// Counter-based pseudo-random generator: the splitmix64 finalizer applied to
// seed + counter * golden-gamma.  Value i depends only on (seed, i), so
// streams are reproducible across platforms and trivially splittable.

#include <cstdint>

namespace decotopo {

struct CounterRng {
  uint64_t seed = 0;

  static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  uint64_t word(uint64_t counter) const { return mix(seed + kGamma * counter); }

  // uniform in [0, 1), 53-bit mantissa
  double uniform(uint64_t counter) const {
    return static_cast<double>(word(counter) >> 11) * 0x1.0p-53;
  }

  // uniform in {0, ..., m-1}; fine for m far below 2^64
  uint64_t below(uint64_t counter, uint64_t m) const { return word(counter) % m; }
};

// Sequential facade over CounterRng.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : rng_{seed} {}
  uint64_t next_word() { return rng_.word(counter_++); }
  double next_uniform() { return rng_.uniform(counter_++); }
  uint64_t next_below(uint64_t m) { return rng_.below(counter_++, m); }
  // standard normal via Box-Muller on two counter words
  double next_normal();

 private:
  CounterRng rng_;
  uint64_t counter_ = 0;
};

inline double RngStream::next_normal() {
  double u1 = next_uniform();
  double u2 = next_uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace decotopo
