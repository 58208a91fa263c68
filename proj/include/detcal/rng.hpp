#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace detcal::rng {

/// Stage tags used when deriving independent streams from a master seed.
enum class Tag : std::uint64_t {
  Scene = 1,
  Rater = 2,
  Evidence = 3,
  Model = 4,
  ModelImage = 5,
  ValidationDraw = 6,
  Bootstrap = 7,
  Trial = 8,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives a stream key from a master seed and a counter path, e.g.
/// (seed, {Tag::ModelImage, model, image}). Distinct paths give
/// statistically independent streams, so work items can be generated in any
/// order or in parallel with identical results.
std::uint64_t derive_key(std::uint64_t seed, Tag tag, std::initializer_list<std::uint64_t> path = {});

/// A random stream. The engine is std::mt19937_64, whose output sequence is
/// fixed by the standard; the distributions are implemented here because the
/// standard library's are not reproducible across implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : engine_(key) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unbiased integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller (no cached second variate).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  /// Poisson variate (Knuth's product method; normal approximation above 500).
  std::uint64_t poisson(double mean);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

inline Stream stream(std::uint64_t seed, Tag tag, std::initializer_list<std::uint64_t> path = {}) {
  return Stream(derive_key(seed, tag, path));
}

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace detcal::rng
