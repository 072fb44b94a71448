#include <ostream>

#include "gapflow/sim/metrics.hpp"

namespace gapflow::sim {

void record_trace(const WorldState& world, std::vector<TraceSample>& trace) {
  for (const auto& v : world.vehicles) {
    trace.push_back(TraceSample{world.tick, world.time, v.id, v.lane, v.position, v.speed,
                                v.accel, v.kind});
  }
}

void write_trace_csv(std::ostream& out, std::span<const TraceSample> trace) {
  out << "tick,vehicle_id,lane,position_m,speed_mps,accel_mps2,kind\n";
  const auto precision = out.precision(17);
  for (const auto& s : trace) {
    out << s.tick << ',' << s.vehicle_id << ',' << s.lane << ',' << s.position << ','
        << s.speed << ',' << s.accel << ',' << to_string(s.kind) << '\n';
  }
  out.precision(precision);
}

void write_grid_csv(std::ostream& out, const SpaceTimeGrid& grid) {
  out << "x_bin_start_m,t_bin_start_s,mean_speed_mps,sample_count\n";
  const auto precision = out.precision(17);
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    for (std::size_t t = 0; t < grid.cells[i].size(); ++t) {
      const auto& cell = grid.cells[i][t];
      out << grid.x_bin_start(i) << ',' << grid.t_bin_start(t) << ',';
      if (!cell.missing()) out << cell.mean_speed;
      out << ',' << cell.samples << '\n';
    }
  }
  out.precision(precision);
}

}  // namespace gapflow::sim
