#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gapflow/sim/types.hpp"

namespace gapflow::sim {

/// Per-lane ordering of a vehicle vector, front-most vehicle first. Holds
/// indices into the vector it was built from; rebuild after the vector is
/// resized or reordered.
class LaneIndex {
 public:
  LaneIndex(const std::vector<Vehicle>& vehicles, int lane_count);

  std::span<const std::size_t> lane(int lane) const { return lanes_.at(lane); }
  int lane_count() const { return static_cast<int>(lanes_.size()); }

  /// Nearest vehicle in `lane` whose front is strictly ahead of `position`.
  std::optional<std::size_t> ahead(int lane, double position) const;
  /// Nearest vehicle in `lane` whose front is at or behind `position`,
  /// skipping `exclude`.
  std::optional<std::size_t> behind(int lane, double position,
                                    std::optional<std::size_t> exclude = {}) const;

  /// In-lane neighbours of a vehicle already indexed in its own lane.
  std::optional<std::size_t> leader_of(std::size_t vehicle) const;
  std::optional<std::size_t> follower_of(std::size_t vehicle) const;

  /// Re-files a vehicle after its lane field changed (position unchanged).
  void move(std::size_t vehicle, int from_lane);

 private:
  std::size_t slot_of(std::size_t vehicle, int lane) const;

  const std::vector<Vehicle>* vehicles_;
  std::vector<std::vector<std::size_t>> lanes_;
};

}  // namespace gapflow::sim
