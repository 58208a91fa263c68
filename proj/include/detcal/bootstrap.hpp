#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "detcal/exec.hpp"

namespace detcal {

/// A metric over a multiset of image indices (sorted; repeats allowed and
/// counted with multiplicity). Must be safe to call concurrently when used
/// with Exec::Parallel.
using MetricFn = std::function<double(std::span<const std::size_t>)>;

struct BootstrapOptions {
  std::size_t resamples = 100;
  std::uint64_t seed = 0;
  double level = 0.95;  // percentile confidence level

  void validate() const;
};

struct BootstrapResult {
  std::string metric_name;
  double point_estimate = 0.0;  // metric on the original image set
  std::vector<double> samples;  // one per resample, in iteration order
  double mean = 0.0;
  double std = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double level = 0.95;
  std::uint64_t seed = 0;
};

/// Indices drawn with replacement for one iteration, sorted. The stream is
/// derived from (seed, iteration) alone, so iterations are independent of
/// each other and of scheduling.
std::vector<std::size_t> bootstrap_resample(std::size_t n_images, std::uint64_t seed, std::size_t iteration);

/// Evaluates `metric` on `options.resamples` resamples of n_images images.
/// A metric failure is rethrown as DomainError naming the iteration.
BootstrapResult bootstrap_metric(std::string metric_name, std::size_t n_images, const MetricFn& metric,
                                 const BootstrapOptions& options, Exec exec = Exec::Parallel);

/// Fills mean, std and the percentile interval from `samples`.
void summarize_samples(BootstrapResult& result);

/// Paired comparison of two bootstrap runs over the same resamples.
struct Comparison {
  std::string metric_name;
  std::size_t resamples = 0;
  double mean_difference = 0.0;  // mean of a_i - b_i
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double level = 0.95;
  bool significant = false;  // the interval excludes 0
};

/// Requires equal metric names, resample counts and seeds (otherwise the
/// pairing is meaningless and DomainError is thrown).
Comparison compare(const BootstrapResult& a, const BootstrapResult& b);

}  // namespace detcal
