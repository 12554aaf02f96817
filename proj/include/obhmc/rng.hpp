#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace obhmc {

/// Labeled sub-stream offsets added to a base seed, so that every random
/// quantity in a run is reproducible from (config, seed) alone.
enum class SeedStream : std::uint64_t { noise = 0, dither = 1, omega = 2 };

/// Deterministic random source. std::mt19937_64 is fully specified by the
/// standard, and the transforms below avoid std::*_distribution (whose
/// output is implementation-defined), so a seed pins the exact stream.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t base_seed, SeedStream s) {
    return Rng(base_seed + static_cast<std::uint64_t>(s));
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * unit(); }

  /// Standard normal via Box-Muller, cosine branch only; consumes exactly
  /// two engine draws per call.
  double gaussian() {
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Circularly symmetric complex Gaussian with total variance `variance`
  /// (variance/2 per part). Real part is drawn first.
  std::complex<double> complex_gaussian(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = s * gaussian();
    const double im = s * gaussian();
    return {re, im};
  }

  /// Uniform integer in [0, bound) by modulo reduction.
  std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

private:
  std::mt19937_64 engine_;
};

}  // namespace obhmc
