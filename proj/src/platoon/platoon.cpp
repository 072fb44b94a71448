#include "gapflow/platoon/platoon.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "gapflow/sim/car_following.hpp"

namespace gapflow::platoon {

namespace {

std::optional<std::size_t> index_of(const sim::WorldState& world, sim::VehicleId id) {
  for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
    if (world.vehicles[i].id == id) return i;
  }
  return std::nullopt;
}

const sim::Vehicle* last_in_lane(const sim::WorldState& world, int lane) {
  const sim::Vehicle* last = nullptr;
  for (const auto& v : world.vehicles) {
    if (v.lane == lane && (!last || v.position < last->position)) last = &v;
  }
  return last;
}

}  // namespace

double platoon_span(std::size_t size, double body_length, double gap) {
  if (size == 0) return 0.0;
  return static_cast<double>(size) * body_length + static_cast<double>(size - 1) * gap;
}

double insert_time_for(const PlatoonSpec& spec, const sim::RoadNetwork& road, double speed) {
  const double span = platoon_span(static_cast<std::size_t>(spec.size), 4.5, spec.default_gap);
  // Inserted with the leader's front at `span`; the timed point sits
  // arrival_offset behind it.
  const double travel = road.merge_zone_start - (span - spec.arrival_offset);
  if (speed <= 0.0) return std::max(0.0, spec.scheduled_arrival);
  return std::max(0.0, spec.scheduled_arrival - travel / speed);
}

int form_platoon(sim::WorldState& world, const PlatoonSpec& spec) {
  if (spec.size < 2) throw std::invalid_argument("platoon requires >= 2 members");
  if (!world.config.road.is_mainline(spec.lane)) {
    throw std::invalid_argument("platoon lane " + std::to_string(spec.lane) +
                                " is not a mainline lane");
  }
  if (spec.default_gap < kGapMin || spec.default_gap > kGapMax) {
    throw std::invalid_argument("platoon default gap outside [2, 30] m");
  }

  sim::PlatoonSchedule schedule;
  schedule.platoon_id = world.next_platoon_id++;
  schedule.spec = spec;

  std::seed_seq seq{static_cast<std::uint32_t>(world.config.flow.seed),
                    static_cast<std::uint32_t>(world.config.flow.seed >> 32),
                    static_cast<std::uint32_t>(schedule.platoon_id), 0x9147u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> length(world.config.vehicle_length_min,
                                                world.config.vehicle_length_max);
  for (int i = 0; i < spec.size; ++i) schedule.lengths.push_back(length(rng));
  double jitter = 0.0;
  if (spec.arrival_jitter > 0.0) {
    jitter = std::uniform_real_distribution<double>(0.0, spec.arrival_jitter)(rng);
  }
  const double speed = world.config.flow.injection_speed;
  schedule.insert_time = insert_time_for(spec, world.config.road, speed) + jitter;
  schedule.reserve_length =
      std::accumulate(schedule.lengths.begin(), schedule.lengths.end(), 0.0) +
      static_cast<double>(spec.size - 1) * spec.default_gap +
      sim::desired_gap(speed, 0.0, world.config.car_following);
  schedule.reserve_time =
      speed > 0.0 ? std::max(0.0, schedule.insert_time - schedule.reserve_length / speed)
                  : schedule.insert_time;

  world.schedules.push_back(std::move(schedule));
  auto& stored = world.schedules.back();
  if (world.time >= stored.insert_time) try_insert_platoon(world, stored);
  return stored.platoon_id;
}

bool try_insert_platoon(sim::WorldState& world, sim::PlatoonSchedule& schedule) {
  if (schedule.inserted) return true;
  const auto& config = world.config;
  const auto& spec = schedule.spec;
  const double span = std::accumulate(schedule.lengths.begin(), schedule.lengths.end(), 0.0) +
                      static_cast<double>(spec.size - 1) * spec.default_gap;

  double speed = config.flow.injection_speed;
  if (const sim::Vehicle* last = last_in_lane(world, spec.lane)) {
    speed = std::min(speed, last->speed);
    const double gap = last->rear() - span;
    if (gap < sim::desired_gap(speed, speed - last->speed, config.car_following)) return false;
  }

  Platoon platoon;
  platoon.id = schedule.platoon_id;
  platoon.default_gap = spec.default_gap;
  platoon.lane = spec.lane;
  platoon.controlled = spec.controlled;
  platoon.gap_setpoints.assign(static_cast<std::size_t>(spec.size - 1), spec.default_gap);

  double front = span;
  for (int i = 0; i < spec.size; ++i) {
    sim::Vehicle v;
    v.lane = spec.lane;
    v.position = front;
    v.speed = speed;
    v.length = schedule.lengths[static_cast<std::size_t>(i)];
    v.kind = i == 0 ? sim::VehicleKind::platoon_leader : sim::VehicleKind::platoon_member;
    v.assertiveness = config.lane_change.mainline_assertiveness;
    v.platoon_id = platoon.id;
    // Nominal entry: when the vehicle would have crossed the upstream boundary.
    v.entry_position = 0.0;
    v.entry_time = speed > 0.0 ? world.time - front / speed : world.time;
    platoon.member_ids.push_back(sim::add_vehicle(world, v));
    front = v.rear() - spec.default_gap;
  }
  world.platoons.push_back(std::move(platoon));
  schedule.inserted = true;
  return true;
}

double safety_envelope_accel(double ego_speed, double gap, double lead_speed,
                             const sim::CarFollowingParams& cf,
                             const sim::GapControllerParams& params) {
  sim::CarFollowingParams envelope = cf;
  envelope.min_gap = params.safety_min_gap;
  envelope.time_headway = params.safety_time_headway;
  envelope.desired_speed = cf.v_max;
  return sim::car_following_accel(ego_speed, gap, lead_speed, envelope);
}

double safety_envelope_accel(double ego_speed, double gap, double lead_speed,
                             const sim::SimConfig& config) {
  return safety_envelope_accel(ego_speed, gap, lead_speed, config.car_following,
                               config.gap_controller);
}

double member_accel(std::size_t member_index, const Platoon& platoon,
                    const sim::WorldState& world, const sim::LaneIndex& index,
                    const sim::GapControllerParams& params) {
  if (member_index == 0 || member_index >= platoon.size()) {
    throw std::invalid_argument("member_accel needs a follower index");
  }
  const auto self_idx = index_of(world, platoon.member_ids[member_index]);
  if (!self_idx) throw std::invalid_argument("platoon member not in world");
  const sim::Vehicle& self = world.vehicles[*self_idx];
  const auto& cf = world.config.car_following;

  const auto ahead_idx = index.leader_of(*self_idx);
  const sim::Vehicle* ahead = ahead_idx ? &world.vehicles[*ahead_idx] : nullptr;
  const sim::Vehicle* pred = world.find(platoon.member_ids[member_index - 1]);

  if (!pred || pred->lane != self.lane || pred->position <= self.position) {
    if (!ahead) return sim::car_following_accel(self.speed, sim::kInfiniteGap, 0.0, cf);
    return sim::car_following_accel(self.speed, ahead->rear() - self.position, ahead->speed, cf);
  }

  const double gap = pred->rear() - self.position;
  const double setpoint = platoon.gap_setpoints[member_index - 1];
  const double command = params.k_gap * (gap - setpoint) +
                        params.k_speed * (pred->speed - self.speed) + params.k_accel * pred->accel;
  // A member may always brake as hard as its predecessor does.
  const double floor = std::min(params.accel_min, params.k_accel * pred->accel);
  double accel = std::clamp(command, floor, params.accel_max);
  if (ahead) {
    accel = std::min(accel, safety_envelope_accel(self.speed, ahead->rear() - self.position,
                                                  ahead->speed, cf, params));
  }
  return accel;
}

double member_accel(std::size_t member_index, const Platoon& platoon,
                    const sim::WorldState& world) {
  const sim::LaneIndex index(world.vehicles, world.config.road.lane_count());
  return member_accel(member_index, platoon, world, index, world.config.gap_controller);
}

void apply_gap_commands(Platoon& platoon, std::span<const double> gaps) {
  if (platoon.size() < 2 || gaps.size() != platoon.size() - 1) {
    throw std::invalid_argument("gap vector length mismatch");
  }
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    platoon.gap_setpoints[i] = std::clamp(gaps[i], kGapMin, kGapMax);
  }
}

PlatoonSummary platoon_summary(const Platoon& platoon, const sim::WorldState& world) {
  PlatoonSummary out;
  out.platoon_id = platoon.id;
  out.size = platoon.size();
  const sim::Vehicle* prev = nullptr;
  for (const auto id : platoon.member_ids) {
    const sim::Vehicle* v = world.find(id);
    if (!v) throw std::logic_error("platoon member " + std::to_string(id) + " missing");
    if (prev) {
      out.actual_gaps.push_back(prev->rear() - v->position);
    } else {
      out.leader_position = v->position;
      out.leader_speed = v->speed;
    }
    prev = v;
  }
  return out;
}

void update_membership(sim::WorldState& world) {
  for (auto& p : world.platoons) {
    for (std::size_t k = 0; k < p.member_ids.size();) {
      if (world.find(p.member_ids[k])) {
        ++k;
        continue;
      }
      p.member_ids.erase(p.member_ids.begin() + static_cast<std::ptrdiff_t>(k));
      if (!p.gap_setpoints.empty()) {
        const std::size_t g = k == 0 ? 0 : k - 1;
        p.gap_setpoints.erase(p.gap_setpoints.begin() + static_cast<std::ptrdiff_t>(g));
      }
    }
    if (!p.member_ids.empty()) {
      if (auto* leader = world.find(p.member_ids.front())) {
        leader->kind = sim::VehicleKind::platoon_leader;
      }
    }
    if (p.member_ids.size() < 2) {
      for (const auto id : p.member_ids) {
        if (auto* v = world.find(id)) {
          v->kind = sim::VehicleKind::free;
          v->platoon_id = -1;
        }
      }
      p.member_ids.clear();
    }
  }
  std::erase_if(world.platoons, [](const Platoon& p) { return p.member_ids.empty(); });
}

}  // namespace gapflow::platoon
