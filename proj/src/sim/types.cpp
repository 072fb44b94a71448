#include "gapflow/sim/types.hpp"

#include <cmath>

namespace gapflow::sim {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void RoadNetwork::validate() const {
  require(segment_length > 0, "road.segment_length must be positive");
  require(mainline_lanes >= 1, "road.mainline_lanes must be at least 1");
  require(merge_lane_length > 0, "road.merge_lane_length must be positive");
  require(accel_lane_length > 0, "road.accel_lane_length must be positive");
  require(merge_zone_start >= 0, "road.merge_zone_start must be non-negative");
  require(merge_zone_start + accel_lane_length <= segment_length,
          "road: acceleration lane extends past the segment end");
  require(speed_limit > 0, "road.speed_limit must be positive");
}

std::string_view to_string(VehicleKind kind) {
  switch (kind) {
    case VehicleKind::free: return "free";
    case VehicleKind::platoon_leader: return "platoon_leader";
    case VehicleKind::platoon_member: return "platoon_member";
    case VehicleKind::merging: return "merging";
  }
  return "unknown";
}

void CarFollowingParams::validate() const {
  require(desired_speed > 0, "car_following.desired_speed must be positive");
  require(time_headway >= 0, "car_following.time_headway must be non-negative");
  require(min_gap > 0, "car_following.min_gap must be positive");
  require(max_accel > 0, "car_following.max_accel must be positive");
  require(comfort_decel > 0, "car_following.comfort_decel must be positive");
  require(exponent > 0, "car_following.exponent must be positive");
  require(accel_min < 0 && accel_max > 0, "car_following: accel bounds must straddle zero");
  require(v_max >= desired_speed, "car_following.v_max must be >= desired_speed");
}

void LaneChangeParams::validate() const {
  require(politeness >= 0, "lane_change.politeness must be non-negative");
  require(threshold >= 0, "lane_change.threshold must be non-negative");
  require(merging_assertiveness > 0, "lane_change.merging_assertiveness must be positive");
  require(mainline_assertiveness > 0, "lane_change.mainline_assertiveness must be positive");
  require(cooldown >= 0, "lane_change.cooldown must be non-negative");
}

void FlowSpec::validate() const {
  require(mainline_rate >= 0, "flow.mainline_rate must be non-negative");
  require(ramp_rate >= 0, "flow.ramp_rate must be non-negative");
  require(injection_speed >= 0, "flow.injection_speed must be non-negative");
  require(ramp_injection_speed >= 0, "flow.ramp_injection_speed must be non-negative");
}

void GapControllerParams::validate() const {
  require(k_gap > 0 && k_speed > 0, "gap_controller: gains must be positive");
  require(k_speed * k_speed >= 4.0 * k_gap,
          "gap_controller: k_speed^2 must be >= 4 k_gap (underdamped gains)");
  require(k_accel >= 0 && k_accel <= 1, "gap_controller.k_accel must lie in [0, 1]");
  require(accel_min < 0 && accel_max > 0, "gap_controller: accel bounds must straddle zero");
  require(safety_min_gap > 0, "gap_controller.safety_min_gap must be positive");
  require(safety_time_headway >= 0, "gap_controller.safety_time_headway must be non-negative");
}

void SimConfig::validate() const {
  road.validate();
  car_following.validate();
  lane_change.validate();
  flow.validate();
  gap_controller.validate();
  require(dt > 0, "sim.dt must be positive");
  require(vehicle_length_min > 0 && vehicle_length_min <= vehicle_length_max,
          "sim: invalid vehicle length range");
  require(flow.injection_speed <= car_following.v_max &&
              flow.ramp_injection_speed <= car_following.v_max,
          "flow: injection speed exceeds v_max");
}

}  // namespace gapflow::sim
