#pragma once

#include <cstddef>

#include "gapflow/sim/lane_index.hpp"
#include "gapflow/sim/world.hpp"

namespace gapflow::sim {

enum class Direction { left, right };

struct LaneChangeEvaluation {
  bool safe = false;
  bool incentive = false;
  double front_gap = kInfiniteGap;
  double rear_gap = kInfiniteGap;
  double required_front = 0.0;
  double required_rear = 0.0;
  double gain = 0.0;  // MOBIL net advantage (0 for mandatory merges)

  bool accept() const { return safe && incentive; }
};

/// Gap acceptance plus incentive for moving vehicle `vehicle` (an index into
/// world.vehicles) to `target_lane`.
///
/// Safety: the gap to the target-lane leader must be at least s0 + v T of the
/// changer and the gap to the target-lane follower at least s0 + v T of that
/// follower, both divided by the changer's assertiveness. Incentive: always
/// true for a merging vehicle heading onto the mainline; otherwise the MOBIL
/// criterion gain > politeness * (loss of new follower) + threshold.
LaneChangeEvaluation evaluate_lane_change(const WorldState& world, const LaneIndex& index,
                                          std::size_t vehicle, int target_lane);

/// Convenience wrapper taking an id and a direction (left = towards lane 0).
/// Throws std::invalid_argument for an unknown id or an illegal target lane.
bool lane_change_decision(VehicleId id, const WorldState& world, Direction direction);

}  // namespace gapflow::sim
