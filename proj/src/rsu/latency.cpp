#include "gapflow/rsu/latency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace gapflow::rsu {

double LatencyCdf::percentile(double p) const {
  if (sorted.empty()) throw std::logic_error("empty CDF");
  p = std::clamp(p, 0.0, 1.0);
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

LatencyCdf latency_cdf(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("latency_cdf needs at least one sample");
  LatencyCdf cdf;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  cdf.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double fraction = static_cast<double>(i + 1) / n;
    if (!cdf.points.empty() && cdf.points.back().value == samples[i]) {
      cdf.points.back().fraction = fraction;
    } else {
      cdf.points.push_back(CdfPoint{samples[i], fraction});
    }
  }
  cdf.sorted = std::move(samples);
  return cdf;
}

void write_cdf_csv(std::ostream& out, const LatencyCdf& cdf) {
  out << "value_us,cumulative_fraction\n";
  char buf[80];
  for (const auto& p : cdf.points) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", p.value, p.fraction);
    out << buf;
  }
}

}  // namespace gapflow::rsu
