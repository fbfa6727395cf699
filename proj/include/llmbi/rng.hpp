#pragma once

#include <array>
#include <cstdint>

namespace llmbi {

/// Portable random stream: xoshiro256** seeded through splitmix64. The
/// variate transforms are written out here instead of using <random>
/// distributions, whose algorithms differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() {
    double u = 0.0;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  double uniform(double lower, double upper) { return lower + (upper - lower) * uniform(); }

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Standard exponential via the inverse CDF.
  double exponential();

  std::uint64_t next_u64();

 private:
  std::array<std::uint64_t, 4> state_{};
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace llmbi
