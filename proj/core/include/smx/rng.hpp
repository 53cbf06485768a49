#pragma once

#include <cmath>
#include <cstdint>

#include "smx/errors.hpp"

namespace smx {

/// Deterministic RNG with hand-rolled samplers so that streams do not
/// depend on the standard library's distribution implementations.
/// Substreams are derived by index for parallel-safe, order-independent use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed + 0x9e3779b97f4a7c15ULL)) {}

  /// Independent stream for item `index`; identical regardless of the
  /// order in which other substreams are consumed.
  Rng substream(std::uint64_t index) const {
    return Rng(splitmix(state_ ^ (0xbf58476d1ce4e5b9ULL * (index + 1))));
  }

  std::uint64_t next_u64() {
    // xorshift64* step on a splitmix-seeded state
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dULL;
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  /// Standard normal via Box-Muller (no cached spare, keeps streams simple).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  /// Gamma(shape, 1) by Marsaglia-Tsang, with the U^{1/a} boost for shape < 1.
  double gamma(double shape) {
    if (shape <= 0.0) throw PreconditionError("gamma: shape must be positive");
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      double u = uniform();
      while (u <= 0.0) u = uniform();
      return g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
        return d * v;
    }
  }

  /// Beta(a, b) from two gamma draws.
  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    if (x + y == 0.0) return 0.5;  // both underflowed; symmetric tie-break
    return x / (x + y);
  }

 private:
  static std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace smx
