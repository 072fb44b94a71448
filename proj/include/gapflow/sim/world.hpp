#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "gapflow/platoon/types.hpp"
#include "gapflow/sim/types.hpp"

namespace gapflow::sim {

struct ExitRecord {
  VehicleId id = 0;
  double entry_time = 0.0;
  double exit_time = 0.0;
  double entry_position = 0.0;
  VehicleKind kind = VehicleKind::free;

  double traversal_time() const { return exit_time - entry_time; }
  /// Entered at the upstream boundary rather than from the ramp.
  bool full_traversal() const { return entry_position <= 0.0; }
};

/// Poisson arrival process feeding one lane. Arrivals that cannot be placed
/// wait in `pending` (their pre-drawn body lengths) and retry every tick.
struct LaneInjector {
  double rate = 0.0;  // veh/h
  double next_arrival = 0.0;
  std::deque<double> pending;
  std::mt19937_64 rng;
};

struct PlatoonSchedule {
  int platoon_id = -1;
  platoon::PlatoonSpec spec;
  double insert_time = 0.0;
  // From reserve_time on, the lane admits no new vehicles within
  // reserve_length of the entry, so the platoon finds room when due.
  double reserve_time = 0.0;
  double reserve_length = 0.0;
  bool inserted = false;
  std::vector<double> lengths;  // member body lengths, drawn at scheduling
};

struct WorldCounters {
  std::uint64_t arrivals = 0;
  std::uint64_t exited = 0;
  std::uint64_t lane_changes = 0;
  std::uint64_t merges = 0;
  std::uint64_t guard_interventions = 0;
};

/// Complete simulator state. A plain value: copying a world forks an
/// independent, bit-reproducible simulation.
struct WorldState {
  SimConfig config;
  double time = 0.0;
  std::uint64_t tick = 0;
  std::vector<Vehicle> vehicles;
  std::vector<platoon::Platoon> platoons;
  std::vector<PlatoonSchedule> schedules;
  std::vector<ExitRecord> exits;
  std::vector<LaneInjector> injectors;  // one per lane, ramp last
  VehicleId next_id = 1;
  int next_platoon_id = 0;
  WorldCounters counters;

  std::size_t queued() const;
  const Vehicle* find(VehicleId id) const;
  Vehicle* find(VehicleId id);
  const platoon::Platoon* find_platoon(int platoon_id) const;
  platoon::Platoon* find_platoon(int platoon_id);
};

/// Fresh, empty world whose arrival processes are seeded from config.flow.seed.
WorldState make_world(const SimConfig& config);

/// One fixed-size tick: lane changes, accelerations, integration, exits,
/// injections. Returns the advanced world.
WorldState step_world(WorldState world, double dt);

/// In-place form of step_world.
void advance(WorldState& world, double dt);

/// Advances arrival processes to world.time and places queued vehicles and
/// due platoons where the entry is free. Called by advance(); exposed for
/// tests that drive injection directly.
void inject_traffic(WorldState& world);

/// Places a vehicle directly (scene construction for tests and tools).
/// Returns its id. Counts as an arrival for conservation bookkeeping.
VehicleId add_vehicle(WorldState& world, Vehicle vehicle);

/// Throws std::logic_error if any lane has overlapping or mis-ordered vehicles
/// or a ramp vehicle outside the acceleration lane.
void check_invariants(const WorldState& world);

}  // namespace gapflow::sim
