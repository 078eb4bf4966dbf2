#pragma once

// Random sources used by the generators.
//
// SeededRandom draws from std::mt19937_64. Uniform reals take the top 53 bits
// of one 64-bit output; normals use the Marsaglia polar method (pairs cached).
// Both are written out here rather than delegated to <random> distributions,
// whose algorithms are implementation-defined, so streams are stable across
// standard libraries.

#include <cstdint>
#include <random>

namespace vmatte {

// SplitMix64 finaliser applied to seed ^ golden-ratio-scaled index; used to
// derive per-clip seeds from a master seed.
std::uint64_t mix64(std::uint64_t seed, std::uint64_t index);

class RandomSource {
 public:
  virtual ~RandomSource() = default;

  // Uniform on [0, 1).
  virtual double uniform01() = 0;
  // Standard normal N(0, 1).
  virtual double standard_normal() = 0;

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double normal(double sigma) { return sigma * standard_normal(); }
  bool bernoulli(double p) { return uniform01() < p; }
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  // Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
};

class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}

  double uniform01() override;
  double standard_normal() override;

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace vmatte
