#pragma once

#include <cmath>
#include <cstdint>

namespace gridood::scenes {

// SplitMix64. Cheap, state is a single u64, and sequential seeds give
// statistically independent streams, which is what per-scene seeding needs.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // [0,1)
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0,n)
  std::uint64_t uniform_int(std::uint64_t n) { return next() % n; }

  // Standard normal via Box-Muller; consumes exactly two draws.
  double normal() {
    const double u1 =
        static_cast<double>((next() >> 11) + 1ULL) * 0x1.0p-53;  // (0,1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace gridood::scenes
