#include "gapflow/sim/world.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gapflow/platoon/platoon.hpp"
#include "gapflow/sim/car_following.hpp"
#include "gapflow/sim/lane_change.hpp"
#include "gapflow/sim/lane_index.hpp"

namespace gapflow::sim {

namespace {

// Distinct, fixed stream per lane so demand does not depend on dynamics.
void seed_lane(std::mt19937_64& rng, std::uint64_t seed, int lane) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(lane), 0x1a9eu};
  rng.seed(seq);
}

double draw_headway(LaneInjector& injector) {
  std::exponential_distribution<double> headway(injector.rate / 3600.0);
  return headway(injector.rng);
}

double draw_length(const SimConfig& config, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> length(config.vehicle_length_min,
                                                config.vehicle_length_max);
  return length(rng);
}

double entry_position(const RoadNetwork& road, int lane) {
  return lane == road.ramp_lane() ? road.merge_zone_start : 0.0;
}

// Rear-most vehicle in a lane, or null.
const Vehicle* last_in_lane(const std::vector<Vehicle>& vehicles, int lane) {
  const Vehicle* last = nullptr;
  for (const auto& v : vehicles) {
    if (v.lane == lane && (!last || v.position < last->position)) last = &v;
  }
  return last;
}

// Length of the entry zone held clear for a pending platoon (0 if none).
double reserved_entry(const WorldState& world, int lane) {
  double extent = 0.0;
  for (const auto& s : world.schedules) {
    if (!s.inserted && s.spec.lane == lane && world.time >= s.reserve_time) {
      extent = std::max(extent, s.reserve_length);
    }
  }
  return extent;
}

void apply_lane_changes(WorldState& world, LaneIndex& index) {
  auto& vehicles = world.vehicles;
  const auto& road = world.config.road;
  const auto& lc = world.config.lane_change;

  std::vector<std::size_t> order(vehicles.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (vehicles[a].position != vehicles[b].position) {
      return vehicles[a].position > vehicles[b].position;
    }
    return vehicles[a].id < vehicles[b].id;
  });

  for (const std::size_t i : order) {
    Vehicle& v = vehicles[i];
    int target = -1;
    if (v.kind == VehicleKind::merging) {
      if (evaluate_lane_change(world, index, i, road.adjacent_lane()).accept()) {
        target = road.adjacent_lane();
      }
    } else if (v.kind == VehicleKind::free && road.is_mainline(v.lane) &&
               world.time - v.last_lane_change >= lc.cooldown) {
      double best_gain = -kInfiniteGap;
      for (const int candidate : {v.lane - 1, v.lane + 1}) {
        if (!road.is_mainline(candidate)) continue;
        if (v.rear() < reserved_entry(world, candidate)) continue;
        const auto eval = evaluate_lane_change(world, index, i, candidate);
        if (eval.accept() && eval.gain > best_gain) {
          best_gain = eval.gain;
          target = candidate;
        }
      }
    }
    if (target < 0) continue;

    const int from = v.lane;
    v.lane = target;
    v.last_lane_change = world.time;
    ++world.counters.lane_changes;
    if (v.kind == VehicleKind::merging) {
      v.kind = VehicleKind::free;
      ++world.counters.merges;
    }
    index.move(i, from);
  }
}

void compute_accelerations(WorldState& world, const LaneIndex& index) {
  auto& vehicles = world.vehicles;
  const auto& config = world.config;
  const auto& road = config.road;

  // Free vehicles and platoon leaders first; followers then run front to back
  // so each sees its predecessor's acceleration for this tick.
  std::vector<bool> follower(vehicles.size(), false);
  for (const auto& p : world.platoons) {
    for (std::size_t k = 1; k < p.member_ids.size(); ++k) {
      for (std::size_t i = 0; i < vehicles.size(); ++i) {
        if (vehicles[i].id == p.member_ids[k]) follower[i] = true;
      }
    }
  }

  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    if (follower[i]) continue;
    Vehicle& v = vehicles[i];
    double a = 0.0;
    const auto lead = index.leader_of(i);
    if (lead) {
      const Vehicle& l = vehicles[*lead];
      a = car_following_accel(v.speed, l.rear() - v.position, l.speed, config.car_following);
    } else {
      a = car_following_accel(v.speed, kInfiniteGap, 0.0, config.car_following);
    }
    if (v.lane == road.ramp_lane()) {
      // The end of the acceleration lane is a standing obstacle.
      const double to_end = std::max(road.merge_zone_end() - v.position, kStandstillGuard);
      a = std::min(a, car_following_accel(v.speed, to_end, 0.0, config.car_following));
    }
    v.accel = std::clamp(a, config.car_following.accel_min, config.car_following.accel_max);
  }

  for (const auto& p : world.platoons) {
    for (std::size_t k = 1; k < p.member_ids.size(); ++k) {
      Vehicle* v = world.find(p.member_ids[k]);
      if (!v) continue;
      const double a = platoon::member_accel(k, p, world, index, config.gap_controller);
      v->accel = std::clamp(a, config.car_following.accel_min, config.car_following.accel_max);
    }
  }
}

void integrate(WorldState& world, const LaneIndex& index, double dt) {
  auto& vehicles = world.vehicles;
  const auto& cf = world.config.car_following;
  const auto& road = world.config.road;

  std::vector<double> old_position(vehicles.size());
  std::vector<double> old_speed(vehicles.size());
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    Vehicle& v = vehicles[i];
    old_position[i] = v.position;
    old_speed[i] = v.speed;
    v.speed = std::clamp(v.speed + v.accel * dt, 0.0, cf.v_max);
    v.position += v.speed * dt;
  }

  // Position guard, front to back: nobody ends the tick closer than
  // kStandstillGuard to the rear of the vehicle (or lane end) ahead.
  for (int lane = 0; lane < index.lane_count(); ++lane) {
    double bound = lane == road.ramp_lane() ? road.merge_zone_end() - kStandstillGuard
                                            : kInfiniteGap;
    for (const std::size_t i : index.lane(lane)) {
      Vehicle& v = vehicles[i];
      if (v.position > bound) {
        v.position = std::max(old_position[i], bound);
        v.speed = std::clamp((v.position - old_position[i]) / dt, 0.0, cf.v_max);
        v.accel = std::clamp((v.speed - old_speed[i]) / dt, cf.accel_min, cf.accel_max);
        ++world.counters.guard_interventions;
      }
      bound = v.rear() - kStandstillGuard;
    }
  }
}

void remove_exited(WorldState& world) {
  const double end = world.config.road.segment_length;
  auto& vehicles = world.vehicles;
  auto it = std::stable_partition(vehicles.begin(), vehicles.end(),
                                  [&](const Vehicle& v) { return v.position < end; });
  for (auto e = it; e != vehicles.end(); ++e) {
    world.exits.push_back(ExitRecord{e->id, e->entry_time, world.time, e->entry_position, e->kind});
    ++world.counters.exited;
  }
  vehicles.erase(it, vehicles.end());
}

}  // namespace

std::size_t WorldState::queued() const {
  std::size_t n = 0;
  for (const auto& inj : injectors) n += inj.pending.size();
  return n;
}

const Vehicle* WorldState::find(VehicleId id) const {
  for (const auto& v : vehicles) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

Vehicle* WorldState::find(VehicleId id) {
  return const_cast<Vehicle*>(static_cast<const WorldState&>(*this).find(id));
}

const platoon::Platoon* WorldState::find_platoon(int platoon_id) const {
  for (const auto& p : platoons) {
    if (p.id == platoon_id) return &p;
  }
  return nullptr;
}

platoon::Platoon* WorldState::find_platoon(int platoon_id) {
  return const_cast<platoon::Platoon*>(
      static_cast<const WorldState&>(*this).find_platoon(platoon_id));
}

WorldState make_world(const SimConfig& config) {
  config.validate();
  WorldState world;
  world.config = config;
  const auto& road = config.road;
  world.injectors.resize(static_cast<std::size_t>(road.lane_count()));
  for (int lane = 0; lane < road.lane_count(); ++lane) {
    auto& inj = world.injectors[static_cast<std::size_t>(lane)];
    inj.rate = lane == road.ramp_lane() ? config.flow.ramp_rate : config.flow.mainline_rate;
    seed_lane(inj.rng, config.flow.seed, lane);
    inj.next_arrival = inj.rate > 0 ? draw_headway(inj) : kInfiniteGap;
  }
  return world;
}

VehicleId add_vehicle(WorldState& world, Vehicle vehicle) {
  vehicle.id = world.next_id++;
  world.vehicles.push_back(vehicle);
  ++world.counters.arrivals;
  return vehicle.id;
}

void inject_traffic(WorldState& world) {
  const auto& config = world.config;
  const auto& road = config.road;

  for (auto& schedule : world.schedules) {
    if (!schedule.inserted && world.time >= schedule.insert_time) {
      platoon::try_insert_platoon(world, schedule);
    }
  }

  for (int lane = 0; lane < road.lane_count(); ++lane) {
    auto& inj = world.injectors[static_cast<std::size_t>(lane)];
    while (inj.next_arrival <= world.time) {
      inj.pending.push_back(draw_length(config, inj.rng));
      ++world.counters.arrivals;
      inj.next_arrival += draw_headway(inj);
    }
    if (inj.pending.empty() || reserved_entry(world, lane) > 0.0) continue;

    const bool ramp = lane == road.ramp_lane();
    const double entry = entry_position(road, lane);
    double speed = ramp ? config.flow.ramp_injection_speed : config.flow.injection_speed;
    if (const Vehicle* last = last_in_lane(world.vehicles, lane)) {
      speed = std::min(speed, last->speed);
      const double gap = last->rear() - entry;
      if (gap < desired_gap(speed, speed - last->speed, config.car_following)) continue;
    }

    Vehicle v;
    v.id = world.next_id++;
    v.lane = lane;
    v.position = entry;
    v.speed = speed;
    v.length = inj.pending.front();
    v.kind = ramp ? VehicleKind::merging : VehicleKind::free;
    v.assertiveness = ramp ? config.lane_change.merging_assertiveness
                           : config.lane_change.mainline_assertiveness;
    v.entry_time = world.time;
    v.entry_position = entry;
    inj.pending.pop_front();
    world.vehicles.push_back(v);
  }
}

void advance(WorldState& world, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const int lanes = world.config.road.lane_count();
  {
    LaneIndex index(world.vehicles, lanes);
    apply_lane_changes(world, index);
    compute_accelerations(world, index);
    integrate(world, index, dt);
  }
  world.time += dt;
  ++world.tick;
  remove_exited(world);
  platoon::update_membership(world);
  inject_traffic(world);
#ifndef NDEBUG
  check_invariants(world);
#endif
}

WorldState step_world(WorldState world, double dt) {
  advance(world, dt);
  return world;
}

void check_invariants(const WorldState& world) {
  const auto& road = world.config.road;
  const LaneIndex index(world.vehicles, road.lane_count());
  for (int lane = 0; lane < road.lane_count(); ++lane) {
    const Vehicle* ahead = nullptr;
    for (const std::size_t i : index.lane(lane)) {
      const Vehicle& v = world.vehicles[i];
      if (lane == road.ramp_lane() &&
          (v.position < road.merge_zone_start || v.position > road.merge_zone_end())) {
        throw std::logic_error("ramp vehicle " + std::to_string(v.id) +
                               " outside the acceleration lane");
      }
      if (ahead && v.position > ahead->rear()) {
        throw std::logic_error("overlap in lane " + std::to_string(lane) + " between vehicles " +
                               std::to_string(ahead->id) + " and " + std::to_string(v.id));
      }
      ahead = &v;
    }
  }
}

}  // namespace gapflow::sim
