#pragma once

#include <cmath>
#include <cstdint>

#include "spray/vec2.hpp"

namespace spray {

// Splittable deterministic generator (splitmix64).  A stream is identified by
// (seed, cell); decorrelation comes from running both through the splitmix
// finalizer before combining.  Every random draw in the project goes through
// this type, so runs are reproducible bit for bit on any platform.
struct Rng {
  std::uint64_t state;

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  explicit Rng(std::uint64_t seed) : state(mix(seed)) {}
  Rng(std::uint64_t seed, std::uint64_t cell)
      : state(mix(mix(seed) ^ mix(cell ^ 0xC2B2AE3D27D4EB4Full))) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal, Box-Muller on own uniforms (no library distributions,
  // which are not reproducible across standard library implementations)
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Vec2 gaussian2() {
    double gx = gaussian();
    double gy = gaussian();
    return {gx, gy};
  }

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace spray
