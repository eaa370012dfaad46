#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "robnet/errors.hpp"

namespace robnet {

// Counter-based 64-bit generator (SplitMix64 output function over an
// incrementing state). Two properties the project relies on:
//  * identical (seed, stream) pairs reproduce identical draws on every
//    platform — no library-dependent distribution algorithms are used;
//  * distinct streams under one master seed are statistically independent,
//    so parallel replicates can each own stream = replicate index and the
//    result is schedule-independent.
class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(seed + 0x9E3779B97F4A7C15ULL) ^
               mix(stream + 0xD1B54A32D192ED03ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    return mix(z);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe to pass to log().
  double uniform_pos() { return 1.0 - uniform01(); }

  // Unbiased integer in [0, n). Multiply-shift with rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw parameter_error("uniform_below: n must be positive");
    while (true) {
      std::uint64_t x = (*this)();
      __uint128_t m = static_cast<__uint128_t>(x) * n;
      std::uint64_t lo = static_cast<std::uint64_t>(m);
      if (lo >= n || lo >= (0ULL - n) % n) return static_cast<std::uint64_t>(m >> 64);
    }
  }

  // Standard normal via Box-Muller (two uniforms per call, no cached spare,
  // which keeps the draw count deterministic).
  double normal() {
    double u1 = uniform_pos();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double exponential() { return -std::log(uniform_pos()); }

  // Poisson: product-of-uniforms for small means, additive splitting above
  // (a sum of independent Poissons is Poisson, so the split is exact).
  long long poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
      throw parameter_error("poisson: mean must be finite and nonnegative");
    long long total = 0;
    while (mean > 30.0) {
      total += poisson_small(15.0);
      mean -= 15.0;
    }
    return total + poisson_small(mean);
  }

  // Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 boosted through
  // Gamma(shape+1) * U^{1/shape}.
  double gamma(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape))
      throw parameter_error("gamma: shape must be finite and positive");
    if (shape < 1.0)
      return gamma(shape + 1.0) * std::pow(uniform_pos(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
      double x = normal();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      double v = t * t * t;
      double u = uniform_pos();
      double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Well-mixed child seed for handing to samplers that take a bare seed;
  // replicate r of a run with master seed s uses derive_seed(s, r).
  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix(master + 0x9E3779B97F4A7C15ULL) + mix(stream + 0xD1B54A32D192ED03ULL);
  }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  long long poisson_small(double mean) {
    const double limit = std::exp(-mean);
    long long k = 0;
    double prod = uniform_pos();
    while (prod > limit) {
      ++k;
      prod *= uniform_pos();
    }
    return k;
  }

  std::uint64_t state_;
};

}  // namespace robnet
