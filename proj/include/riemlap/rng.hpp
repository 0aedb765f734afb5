#pragma once

#include <cmath>
#include <cstdint>

#include "riemlap/types.hpp"

namespace riemlap {

// SplitMix64. Self-contained so that streams do not depend on the standard
// library's distribution implementations.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic scalar stream: uniforms in (0,1] and standard normals
/// (Box-Muller). Streams for (seed, index) pairs are derived by a counter
/// mix, so per-sample draws are independent of scheduling order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // burn-in scrambles trivially related seeds apart
    splitmix64(state_);
    splitmix64(state_);
  }

  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = a ^ (0x9E3779B97F4A7C15ull * (index + 1));
    std::uint64_t b = splitmix64(s);
    return Rng(b);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform on (0, 1].
  double uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Vec normal_vec(int n) {
    Vec z(n);
    for (int i = 0; i < n; ++i) z[i] = normal();
    return z;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace riemlap
