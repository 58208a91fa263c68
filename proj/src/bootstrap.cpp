#include "detcal/bootstrap.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <tuple>

#include "detcal/error.hpp"
#include "detcal/rng.hpp"
#include "detcal/stats.hpp"

namespace detcal {

void BootstrapOptions::validate() const {
  if (resamples == 0) throw DomainError("bootstrap needs at least one resample");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0,1)");
}

std::vector<std::size_t> bootstrap_resample(std::size_t n_images, std::uint64_t seed, std::size_t iteration) {
  if (n_images == 0) throw DomainError("cannot resample an empty image set");
  auto rs = rng::stream(seed, rng::Tag::Bootstrap, {iteration});
  std::vector<std::size_t> draw(n_images);
  for (auto& i : draw) i = static_cast<std::size_t>(rs.below(n_images));
  std::sort(draw.begin(), draw.end());
  return draw;
}

namespace {

std::pair<double, double> percentile_interval(std::vector<double> values, double level) {
  std::sort(values.begin(), values.end());
  const double tail = (1.0 - level) / 2.0;
  return {stats::quantile_sorted(values, tail), stats::quantile_sorted(values, 1.0 - tail)};
}

}  // namespace

void summarize_samples(BootstrapResult& result) {
  result.mean = stats::mean(result.samples);
  result.std = stats::stddev(result.samples);
  std::tie(result.ci_lo, result.ci_hi) = percentile_interval(result.samples, result.level);
}

BootstrapResult bootstrap_metric(std::string metric_name, std::size_t n_images, const MetricFn& metric,
                                 const BootstrapOptions& options, Exec exec) {
  options.validate();
  if (n_images == 0) throw DomainError("bootstrap needs at least one image");
  BootstrapResult result;
  result.metric_name = std::move(metric_name);
  result.level = options.level;
  result.seed = options.seed;
  std::vector<std::size_t> all(n_images);
  std::iota(all.begin(), all.end(), std::size_t{0});
  result.point_estimate = metric(all);

  result.samples.resize(options.resamples);
  parallel_for(exec, options.resamples, [&](std::size_t b) {
    const auto draw = bootstrap_resample(n_images, options.seed, b);
    try {
      result.samples[b] = metric(draw);
    } catch (const std::exception& e) {
      throw DomainError("metric '" + result.metric_name + "' failed on bootstrap iteration " + std::to_string(b) +
                        ": " + e.what());
    }
  });
  summarize_samples(result);
  return result;
}

Comparison compare(const BootstrapResult& a, const BootstrapResult& b) {
  if (a.metric_name != b.metric_name) {
    throw DomainError("cannot compare bootstrap runs of different metrics ('" + a.metric_name + "' vs '" +
                      b.metric_name + "')");
  }
  if (a.samples.size() != b.samples.size()) throw DomainError("cannot pair bootstrap runs with different B");
  if (a.seed != b.seed) throw DomainError("cannot pair bootstrap runs with different seeds");
  if (a.samples.empty()) throw DomainError("cannot compare empty bootstrap runs");
  std::vector<double> diff(a.samples.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a.samples[i] - b.samples[i];
  Comparison c;
  c.metric_name = a.metric_name;
  c.resamples = diff.size();
  c.level = a.level;
  c.mean_difference = stats::mean(diff);
  std::tie(c.ci_lo, c.ci_hi) = percentile_interval(diff, a.level);
  c.significant = c.ci_lo > 0.0 || c.ci_hi < 0.0;
  return c;
}

}  // namespace detcal
