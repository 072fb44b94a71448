#pragma once

#include "gapflow/sim/types.hpp"

namespace gapflow::sim {

/// IDM desired dynamic gap s*(v, dv) = s0 + v T + v dv / (2 sqrt(a b)).
/// The dynamic term is allowed to go negative when the leader pulls away;
/// the result is floored at s0.
double desired_gap(double ego_speed, double approach_rate, const CarFollowingParams& params);

/// IDM acceleration a [1 - (v/v0)^delta - (s*/gap)^2], clamped to
/// [accel_min, accel_max]. A leaderless vehicle passes kInfiniteGap.
/// Throws std::invalid_argument("invalid gap") for a finite gap <= 0.
double car_following_accel(double ego_speed, double gap, double lead_speed,
                           const CarFollowingParams& params);

}  // namespace gapflow::sim
