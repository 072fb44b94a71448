#pragma once

#include <vector>

#include "gapflow/sim/types.hpp"

namespace gapflow::platoon {

inline constexpr double kGapMin = 2.0;
inline constexpr double kGapMax = 30.0;

/// A platoon alive in the world. member_ids[0] is the leader;
/// gap_setpoints[i] is the commanded bumper-to-bumper gap between member i
/// and member i+1.
struct Platoon {
  int id = -1;
  std::vector<sim::VehicleId> member_ids;
  std::vector<double> gap_setpoints;
  double default_gap = kGapMin;
  int lane = 0;
  bool controlled = false;

  std::size_t size() const { return member_ids.size(); }
};

/// Scenario-level description of a platoon to be injected at the segment
/// entry so that its leader reaches the merge zone near `scheduled_arrival`.
struct PlatoonSpec {
  int lane = 0;
  int size = 2;
  double default_gap = kGapMin;
  double scheduled_arrival = 30.0;  // s after scenario start
  double arrival_jitter = 0.0;      // uniform extra delay in [0, jitter]
  double arrival_offset = 0.0;      // m behind the leader's front that is timed
  bool controlled = false;
};

}  // namespace gapflow::platoon
