#pragma once

#include <iosfwd>
#include <vector>

namespace gapflow::rsu {

struct CdfPoint {
  double value = 0.0;
  double fraction = 0.0;  // share of samples <= value
};

/// Empirical CDF with one point per distinct sample value.
struct LatencyCdf {
  std::vector<CdfPoint> points;
  std::vector<double> sorted;
  double mean = 0.0;

  /// Linear interpolation between order statistics, p in [0, 1].
  double percentile(double p) const;
  double median() const { return percentile(0.5); }
};

/// Throws std::invalid_argument on empty input.
LatencyCdf latency_cdf(std::vector<double> samples);

/// CSV: value_us,cumulative_fraction
void write_cdf_csv(std::ostream& out, const LatencyCdf& cdf);

}  // namespace gapflow::rsu
