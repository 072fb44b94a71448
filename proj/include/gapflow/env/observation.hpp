#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gapflow/env/scenario.hpp"
#include "gapflow/platoon/types.hpp"
#include "gapflow/rl/dense_net.hpp"
#include "gapflow/sim/metrics.hpp"
#include "gapflow/sim/world.hpp"

namespace gapflow::env {

/// The roadside-observable part of the state.
struct TrafficSnapshot {
  double density_mainline = 0.0;  // veh/km/lane
  double density_ramp = 0.0;      // veh/km
  double mean_speed_mainline = 0.0;
  double mean_speed_ramp = 0.0;
};

TrafficSnapshot snapshot_of(const sim::SegmentMetrics& metrics);

/// Layout: [density_mainline, density_ramp, speed_mainline, speed_ramp,
/// platoon_length, gap_0 .. gap_{n_max-2}], each min-max normalized and
/// clamped to [0, 1]. Gap slots past platoon_size - 1 hold the normalized
/// `default_gap`. Throws std::invalid_argument if platoon_size > n_max or
/// gaps.size() + 1 != platoon_size (for platoon_size >= 1).
rl::Vector build_observation(const TrafficSnapshot& traffic, std::size_t platoon_size,
                             std::span<const double> gaps, double default_gap,
                             const EnvConfig& config);

/// Observation of `platoon` in `world` using ground-truth metrics.
rl::Vector observe(const sim::WorldState& world, const platoon::Platoon& platoon,
                   const EnvConfig& config);

/// gap_i = gap_min + (clamp(raw_i) + 1) / 2 * (gap_max - gap_min) for the first
/// platoon_size - 1 components; the rest are ignored.
std::vector<double> decode_action(const rl::Vector& raw, std::size_t platoon_size,
                                  const ObservationBounds& bounds = {});

/// Inverse of decode_action for one component.
double encode_gap(double gap, const ObservationBounds& bounds = {});

/// Mean traversal time of full-segment trips that ended in the trailing
/// delay_window; with none, l_segment over the current mean speed.
double average_delay(const sim::WorldState& world, const RewardConfig& config);

/// +1 when delay <= config.threshold(), else -1.
double reward_for_delay(double delay, const RewardConfig& config);
double compute_reward(const sim::WorldState& world, const RewardConfig& config);

}  // namespace gapflow::env
