#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gapflow/platoon/types.hpp"
#include "gapflow/sim/lane_index.hpp"
#include "gapflow/sim/world.hpp"

namespace gapflow::platoon {

/// Registers a platoon for injection at the segment entry. Insertion happens
/// at the scheduled time, or later tick by tick while the entry lacks room.
/// Returns the platoon id. Throws std::invalid_argument if spec.size < 2 or
/// spec.lane is not a mainline lane.
int form_platoon(sim::WorldState& world, const PlatoonSpec& spec);

/// Length from the leader's front to the last member's rear for a platoon
/// with uniform body length and gap.
double platoon_span(std::size_t size, double body_length, double gap);

/// Entry time that puts the timed point of the platoon at the merge zone at
/// spec.scheduled_arrival when travelling at `speed`. Never negative.
double insert_time_for(const PlatoonSpec& spec, const sim::RoadNetwork& road, double speed);

/// Places a due platoon if the entry has room. Returns true on insertion.
bool try_insert_platoon(sim::WorldState& world, sim::PlatoonSchedule& schedule);

/// Gap controller for member `member_index` (>= 1):
///   a = k_gap (gap - setpoint) + k_speed (v_pred - v_self) + k_accel a_pred
/// where a_pred is the predecessor's `accel` field, clamped to the controller
/// bounds (the lower one extended to k_accel a_pred when that is harsher), then
/// capped by the IDM safety envelope against the vehicle directly ahead.
/// Falls back to plain car following if the in-platoon predecessor is gone.
double member_accel(std::size_t member_index, const Platoon& platoon,
                    const sim::WorldState& world, const sim::LaneIndex& index,
                    const sim::GapControllerParams& params);
double member_accel(std::size_t member_index, const Platoon& platoon,
                    const sim::WorldState& world);

/// IDM acceleration used as the members' safety envelope.
double safety_envelope_accel(double ego_speed, double gap, double lead_speed,
                             const sim::SimConfig& config);
double safety_envelope_accel(double ego_speed, double gap, double lead_speed,
                             const sim::CarFollowingParams& cf,
                             const sim::GapControllerParams& params);

/// Replaces the setpoints after clamping each to [kGapMin, kGapMax]. Throws
/// std::invalid_argument("gap vector length mismatch") unless
/// gaps.size() == platoon.size() - 1.
void apply_gap_commands(Platoon& platoon, std::span<const double> gaps);

struct PlatoonSummary {
  int platoon_id = -1;
  double leader_position = 0.0;
  double leader_speed = 0.0;
  std::size_t size = 0;
  std::vector<double> actual_gaps;  // rear of member i to front of member i+1
};

PlatoonSummary platoon_summary(const Platoon& platoon, const sim::WorldState& world);

/// Drops members that left the segment; promotes the next member to leader;
/// dissolves platoons that fall below two members.
void update_membership(sim::WorldState& world);

}  // namespace gapflow::platoon
