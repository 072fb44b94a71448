#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gapflow/sim/world.hpp"

namespace gapflow::sim {

struct SegmentMetrics {
  double mean_speed = 0.0;           // all vehicles on the segment
  double mean_speed_mainline = 0.0;
  double mean_speed_ramp = 0.0;
  double density_mainline = 0.0;     // veh/km/lane
  double density_ramp = 0.0;         // veh/km over the acceleration lane
  double throughput = 0.0;           // veh/h exiting within the window
  double mean_delay = 0.0;           // s, see measure_metrics
  std::size_t vehicles_mainline = 0;
  std::size_t vehicles_ramp = 0;
  std::size_t exits_in_window = 0;
  std::size_t queued = 0;
};

/// Snapshot metrics. Empty populations report the speed limit as their mean
/// speed (free-flow convention). mean_delay is the mean traversal time of
/// full-segment trips that ended within the trailing `window`; with no such
/// trip it falls back to segment_length / mean_speed.
/// Throws std::invalid_argument if window <= 0.
SegmentMetrics measure_metrics(const WorldState& world, double window);

struct TraceSample {
  std::uint64_t tick = 0;
  double time = 0.0;
  VehicleId vehicle_id = 0;
  int lane = 0;
  double position = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  VehicleKind kind = VehicleKind::free;
};

/// Appends one sample per vehicle currently in the world.
void record_trace(const WorldState& world, std::vector<TraceSample>& trace);

/// CSV: tick,vehicle_id,lane,position_m,speed_mps,accel_mps2,kind
void write_trace_csv(std::ostream& out, std::span<const TraceSample> trace);

struct GridSpec {
  double x_start = 0.0;
  double x_end = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t nx = 1;
  std::size_t nt = 1;
  bool include_ramp = true;
};

struct GridCell {
  double mean_speed = 0.0;
  std::size_t samples = 0;

  bool missing() const { return samples == 0; }
};

/// cells[i][t]: mean speed of samples in spatial bin i and time bin t. Bins
/// are half-open except the last, which includes its upper edge.
struct SpaceTimeGrid {
  GridSpec spec;
  std::vector<std::vector<GridCell>> cells;

  double x_bin_start(std::size_t i) const;
  double t_bin_start(std::size_t t) const;
};

SpaceTimeGrid space_time_grid(std::span<const TraceSample> trace, const GridSpec& spec,
                              int ramp_lane);

/// CSV: x_bin_start_m,t_bin_start_s,mean_speed_mps,sample_count. Missing cells
/// leave mean_speed_mps empty.
void write_grid_csv(std::ostream& out, const SpaceTimeGrid& grid);

}  // namespace gapflow::sim
