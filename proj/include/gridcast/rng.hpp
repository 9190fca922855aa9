#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace gridcast {

/// Seeded random source with pinned variate transforms. Draws go through
/// explicit mappings from raw 64-bit words instead of the standard
/// distribution objects, whose output sequences are implementation-defined;
/// this keeps every generated artifact bit-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  /// Independent stream derived from (seed, stream); streams drawn in
  /// parallel or serially produce the same values.
  Rng(std::uint64_t seed, std::uint64_t stream)
      : engine_(mix(seed + 0x9E3779B97F4A7C15ull * (stream + 1))) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Box-Muller; consumes exactly two words.
  double normal(double mean, double sd) {
    const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Exponential with the given mean; consumes one word.
  double exponential(double mean) {
    const double u = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    return -mean * std::log(u);
  }

  /// Uniform integer in [lo, hi].
  long uniform_int(long lo, long hi) {
    return lo + static_cast<long>(uniform01() * static_cast<double>(hi - lo + 1));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer; decorrelates adjacent seeds.
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace gridcast
