#include "gapflow/sim/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace gapflow::sim {

SegmentMetrics measure_metrics(const WorldState& world, double window) {
  if (!(window > 0.0)) throw std::invalid_argument("metrics window must be positive");
  const auto& road = world.config.road;
  SegmentMetrics m;

  double sum_main = 0.0;
  double sum_ramp = 0.0;
  for (const auto& v : world.vehicles) {
    if (v.lane == road.ramp_lane()) {
      sum_ramp += v.speed;
      ++m.vehicles_ramp;
    } else {
      sum_main += v.speed;
      ++m.vehicles_mainline;
    }
  }
  const std::size_t total = m.vehicles_mainline + m.vehicles_ramp;
  m.mean_speed = total ? (sum_main + sum_ramp) / static_cast<double>(total) : road.speed_limit;
  m.mean_speed_mainline = m.vehicles_mainline
                              ? sum_main / static_cast<double>(m.vehicles_mainline)
                              : road.speed_limit;
  m.mean_speed_ramp =
      m.vehicles_ramp ? sum_ramp / static_cast<double>(m.vehicles_ramp) : road.speed_limit;
  m.density_mainline = static_cast<double>(m.vehicles_mainline) /
                       (road.segment_length / 1000.0 * road.mainline_lanes);
  m.density_ramp = static_cast<double>(m.vehicles_ramp) / (road.accel_lane_length / 1000.0);

  const double since = world.time - window;
  double traversal_sum = 0.0;
  std::size_t traversals = 0;
  for (auto it = world.exits.rbegin(); it != world.exits.rend() && it->exit_time > since; ++it) {
    ++m.exits_in_window;
    if (it->full_traversal()) {
      traversal_sum += it->traversal_time();
      ++traversals;
    }
  }
  m.throughput = static_cast<double>(m.exits_in_window) * 3600.0 / window;
  m.mean_delay = traversals ? traversal_sum / static_cast<double>(traversals)
                            : road.segment_length / std::max(m.mean_speed, 1e-9);
  m.queued = world.queued();
  return m;
}

double SpaceTimeGrid::x_bin_start(std::size_t i) const {
  return spec.x_start + (spec.x_end - spec.x_start) * static_cast<double>(i) /
                            static_cast<double>(spec.nx);
}

double SpaceTimeGrid::t_bin_start(std::size_t t) const {
  return spec.t_start + (spec.t_end - spec.t_start) * static_cast<double>(t) /
                            static_cast<double>(spec.nt);
}

namespace {

// Bin of `value` in [lo, hi] split into n bins, or -1 outside.
long bin_of(double value, double lo, double hi, std::size_t n) {
  if (value < lo || value > hi) return -1;
  if (value == hi) return static_cast<long>(n) - 1;
  const auto b = static_cast<long>((value - lo) / (hi - lo) * static_cast<double>(n));
  return std::min(b, static_cast<long>(n) - 1);
}

}  // namespace

SpaceTimeGrid space_time_grid(std::span<const TraceSample> trace, const GridSpec& spec,
                              int ramp_lane) {
  if (spec.nx < 1 || spec.nt < 1) throw std::invalid_argument("grid needs at least one bin");
  if (!(spec.x_end > spec.x_start) || !(spec.t_end > spec.t_start)) {
    throw std::invalid_argument("grid region must be non-empty");
  }
  SpaceTimeGrid grid;
  grid.spec = spec;
  grid.cells.assign(spec.nx, std::vector<GridCell>(spec.nt));
  for (const auto& s : trace) {
    if (!spec.include_ramp && s.lane == ramp_lane) continue;
    const long i = bin_of(s.position, spec.x_start, spec.x_end, spec.nx);
    const long t = bin_of(s.time, spec.t_start, spec.t_end, spec.nt);
    if (i < 0 || t < 0) continue;
    auto& cell = grid.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
    // Running sum; normalized below.
    cell.mean_speed += s.speed;
    ++cell.samples;
  }
  for (auto& column : grid.cells) {
    for (auto& cell : column) {
      if (cell.samples) cell.mean_speed /= static_cast<double>(cell.samples);
    }
  }
  return grid;
}

}  // namespace gapflow::sim
