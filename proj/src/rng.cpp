#include "detcal/rng.hpp"

#include <cmath>
#include <numbers>

namespace detcal::rng {

std::uint64_t derive_key(std::uint64_t seed, Tag tag, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed ^ 0x5DEECE66DULL);
  h = mix64(h ^ mix64(static_cast<std::uint64_t>(tag)));
  for (const auto p : path) h = mix64(h ^ mix64(p + 0xA0761D6478BD642FULL));
  return h;
}

double Stream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Stream::below(std::uint64_t n) {
  // Rejection on the top of the range keeps every residue equally likely.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double Stream::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Stream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  if (mean > 500.0) {
    const double v = std::round(normal(mean, std::sqrt(mean)));
    return v <= 0.0 ? 0 : static_cast<std::uint64_t>(v);
  }
  const double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double prod = uniform();
  while (prod > limit) {
    ++k;
    prod *= uniform();
  }
  return k;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace detcal::rng
