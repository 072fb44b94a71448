#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gapflow::sim {

using VehicleId = std::int64_t;

inline constexpr double kInfiniteGap = std::numeric_limits<double>::infinity();

/// Smallest bumper-to-bumper gap the integrator ever leaves between two
/// vehicles in a lane. Keeps car_following_accel's `gap > 0` precondition.
inline constexpr double kStandstillGuard = 0.01;

/// Geometry of the merge segment. Lanes 0..mainline_lanes-1 are the mainline
/// (0 = leftmost); lane `mainline_lanes` is the acceleration lane, which only
/// exists between merge_zone_start and merge_zone_end().
struct RoadNetwork {
  double segment_length = 1100.0;
  int mainline_lanes = 3;
  double merge_lane_length = 150.0;
  double accel_lane_length = 150.0;
  double merge_zone_start = 450.0;
  double speed_limit = 30.0;

  int ramp_lane() const { return mainline_lanes; }
  int lane_count() const { return mainline_lanes + 1; }
  int adjacent_lane() const { return mainline_lanes - 1; }
  double merge_zone_end() const { return merge_zone_start + accel_lane_length; }
  bool is_mainline(int lane) const { return lane >= 0 && lane < mainline_lanes; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class VehicleKind : std::uint8_t { free, platoon_leader, platoon_member, merging };

std::string_view to_string(VehicleKind kind);

struct Vehicle {
  VehicleId id = 0;
  int lane = 0;
  double position = 0.0;  // front bumper
  double speed = 0.0;
  double accel = 0.0;
  double length = 4.5;
  VehicleKind kind = VehicleKind::free;
  double assertiveness = 1.0;

  double entry_time = 0.0;
  double entry_position = 0.0;
  double last_lane_change = -std::numeric_limits<double>::infinity();
  int platoon_id = -1;

  double rear() const { return position - length; }
};

/// Intelligent Driver Model parameters plus the physical acceleration and
/// speed bounds shared by every vehicle.
struct CarFollowingParams {
  double desired_speed = 30.0;   // v0, tied to the road speed limit
  double time_headway = 1.0;     // T
  double min_gap = 2.0;          // s0
  double max_accel = 2.6;        // a
  double comfort_decel = 4.5;    // b
  double exponent = 4.0;         // delta
  double accel_min = -9.0;
  double accel_max = 2.6;
  double v_max = 40.0;

  void validate() const;
};

struct LaneChangeParams {
  double politeness = 0.3;
  double threshold = 0.2;  // m/s^2
  double merging_assertiveness = 1.0;
  double mainline_assertiveness = 1.0;
  double cooldown = 3.0;  // s between discretionary changes of one vehicle

  void validate() const;
};

/// Stochastic demand. Rates are per lane; the ramp rate feeds the
/// acceleration lane.
struct FlowSpec {
  double mainline_rate = 3600.0;  // veh/h/lane
  double ramp_rate = 1200.0;      // veh/h
  double injection_speed = 30.0;
  double ramp_injection_speed = 20.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Linear gap controller run by each platoon member, plus the IDM parameters
/// of its safety envelope against whatever vehicle is directly ahead. The
/// predecessor's current acceleration is fed forward (ideal V2V), which keeps
/// tight strings from compressing under hard braking; k_accel = 0 gives the
/// plain gap/relative-speed law.
struct GapControllerParams {
  double k_gap = 0.23;   // 1/s^2
  double k_speed = 1.0;  // 1/s
  double k_accel = 1.0;  // feedforward of the predecessor's acceleration
  double accel_min = -4.5;
  double accel_max = 2.6;
  double safety_min_gap = 1.0;
  double safety_time_headway = 0.0;

  /// Requires positive gains, k_speed^2 >= 4 k_gap (no oscillation) and
  /// k_accel in [0, 1].
  void validate() const;
};

struct SimConfig {
  RoadNetwork road;
  CarFollowingParams car_following;
  LaneChangeParams lane_change;
  FlowSpec flow;
  GapControllerParams gap_controller;
  double dt = 0.1;
  double vehicle_length_min = 4.0;
  double vehicle_length_max = 5.0;

  void validate() const;
};

}  // namespace gapflow::sim
