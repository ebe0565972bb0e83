#pragma once

#include "hubcast/errors.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace hubcast {

/// splitmix64 finalizer; used to derive independent substream seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL + b * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_tag(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/**
 * Seeded random source with hand-coded samplers.
 *
 * The engine (std::mt19937_64) is fully specified by the standard and the
 * samplers below consume its output in a fixed order, so every draw is
 * reproducible bit-for-bit across platforms and library versions. The
 * standard <random> distributions are implementation-defined and would
 * break the byte-identical-log contract on a toolchain change.
 */
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform draw in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform draw in (0, 1); rejects exact zeros.
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  /// Standard normal via Box-Muller; the pair is consumed in fixed order.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Mean-one lognormal multiplier: exp(sigma*Z - sigma^2/2).
  double lognormal_unit(double sigma) {
    return std::exp(sigma * normal() - 0.5 * sigma * sigma);
  }

  /**
   * Poisson count by sequential inversion on a single uniform.
   *
   * For a fixed uniform the count is non-decreasing in lambda, which makes
   * demand scaling monotone when each (pair, segment) owns a substream.
   * Valid for the rate magnitudes of interval demand (lambda <= ~700).
   */
  long long poisson(double lambda) {
    if (lambda < 0.0) throw DataError("poisson: negative rate");
    if (lambda > 700.0) throw DataError("poisson: rate too large for inversion sampler");
    double u = uniform();
    long double p = std::exp(static_cast<long double>(-lambda));
    long double cdf = p;
    long long k = 0;
    while (u >= static_cast<double>(cdf) && k < 100000) {
      ++k;
      p *= lambda / static_cast<long double>(k);
      cdf += p;
    }
    return k;
  }

  /// Gamma(shape, scale), Marsaglia-Tsang for shape >= 1 with boost below 1.
  double gamma(double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0) throw DataError("gamma: parameters must be positive");
    if (shape < 1.0) {
      double u = uniform_pos();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform_pos();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v * scale;
    }
  }

private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

} // namespace hubcast
