#pragma once

#include <span>

namespace detcal::stats {

/// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double sum(std::span<const double> values);
/// 0 for an empty span.
double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 when fewer than 2 values.
double stddev(std::span<const double> values);
/// Linear-interpolation quantile of the sorted values, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace detcal::stats
