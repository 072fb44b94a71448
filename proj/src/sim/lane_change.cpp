#include "gapflow/sim/lane_change.hpp"

#include <stdexcept>
#include <string>

#include "gapflow/sim/car_following.hpp"

namespace gapflow::sim {

namespace {

double accel_behind(const Vehicle& ego, const Vehicle* leader, const CarFollowingParams& cf) {
  if (!leader) return car_following_accel(ego.speed, kInfiniteGap, 0.0, cf);
  const double gap = leader->rear() - ego.position;
  if (gap <= 0.0) return cf.accel_min;
  return car_following_accel(ego.speed, gap, leader->speed, cf);
}

}  // namespace

LaneChangeEvaluation evaluate_lane_change(const WorldState& world, const LaneIndex& index,
                                          std::size_t vehicle, int target_lane) {
  const auto& vehicles = world.vehicles;
  const auto& cf = world.config.car_following;
  const auto& lc = world.config.lane_change;
  const auto& road = world.config.road;
  const Vehicle& ego = vehicles.at(vehicle);

  if (!road.is_mainline(target_lane)) throw std::invalid_argument("illegal target lane");

  LaneChangeEvaluation out;
  const auto lead_idx = index.ahead(target_lane, ego.position);
  const auto follow_idx = index.behind(target_lane, ego.position, vehicle);
  const Vehicle* lead = lead_idx ? &vehicles[*lead_idx] : nullptr;
  const Vehicle* follow = follow_idx ? &vehicles[*follow_idx] : nullptr;

  if (lead) {
    out.front_gap = lead->rear() - ego.position;
    out.required_front = (cf.min_gap + ego.speed * cf.time_headway) / ego.assertiveness;
  }
  if (follow) {
    out.rear_gap = ego.rear() - follow->position;
    out.required_rear = (cf.min_gap + follow->speed * cf.time_headway) / ego.assertiveness;
  }
  out.safe = out.front_gap >= out.required_front && out.rear_gap >= out.required_rear &&
             out.front_gap > kStandstillGuard && out.rear_gap > kStandstillGuard;

  if (ego.kind == VehicleKind::merging) {
    out.incentive = true;
    return out;
  }

  // MOBIL: own advantage against the disadvantage imposed on the new follower.
  const auto cur_lead_idx = index.leader_of(vehicle);
  const Vehicle* cur_lead = cur_lead_idx ? &vehicles[*cur_lead_idx] : nullptr;
  const double own_before = accel_behind(ego, cur_lead, cf);
  const double own_after = accel_behind(ego, lead, cf);
  double follower_loss = 0.0;
  if (follow) {
    const double before = accel_behind(*follow, lead, cf);
    const double after = accel_behind(*follow, &ego, cf);
    follower_loss = before - after;
  }
  out.gain = own_after - own_before - lc.politeness * follower_loss;
  out.incentive = out.gain > lc.threshold;
  return out;
}

bool lane_change_decision(VehicleId id, const WorldState& world, Direction direction) {
  std::size_t idx = world.vehicles.size();
  for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
    if (world.vehicles[i].id == id) {
      idx = i;
      break;
    }
  }
  if (idx == world.vehicles.size()) {
    throw std::invalid_argument("unknown vehicle id " + std::to_string(id));
  }
  const int lane = world.vehicles[idx].lane;
  const int target = direction == Direction::left ? lane - 1 : lane + 1;
  const LaneIndex index(world.vehicles, world.config.road.lane_count());
  return evaluate_lane_change(world, index, idx, target).accept();
}

}  // namespace gapflow::sim
