#include "gapflow/sim/lane_index.hpp"

#include <algorithm>
#include <stdexcept>

namespace gapflow::sim {

namespace {

// Front-most first; ties broken by id so the order is total.
struct FrontFirst {
  const std::vector<Vehicle>* vehicles;
  bool operator()(std::size_t a, std::size_t b) const {
    const Vehicle& va = (*vehicles)[a];
    const Vehicle& vb = (*vehicles)[b];
    if (va.position != vb.position) return va.position > vb.position;
    return va.id < vb.id;
  }
};

}  // namespace

LaneIndex::LaneIndex(const std::vector<Vehicle>& vehicles, int lane_count)
    : vehicles_(&vehicles), lanes_(static_cast<std::size_t>(lane_count)) {
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const int lane = vehicles[i].lane;
    if (lane < 0 || lane >= lane_count) throw std::out_of_range("vehicle lane out of range");
    lanes_[static_cast<std::size_t>(lane)].push_back(i);
  }
  for (auto& lane : lanes_) std::sort(lane.begin(), lane.end(), FrontFirst{vehicles_});
}

std::optional<std::size_t> LaneIndex::ahead(int lane, double position) const {
  const auto& order = lanes_.at(static_cast<std::size_t>(lane));
  // First element (front-first) with position <= `position`; the one before it
  // is the closest strictly ahead.
  auto it = std::partition_point(order.begin(), order.end(), [&](std::size_t i) {
    return (*vehicles_)[i].position > position;
  });
  if (it == order.begin()) return std::nullopt;
  return *std::prev(it);
}

std::optional<std::size_t> LaneIndex::behind(int lane, double position,
                                             std::optional<std::size_t> exclude) const {
  const auto& order = lanes_.at(static_cast<std::size_t>(lane));
  auto it = std::partition_point(order.begin(), order.end(), [&](std::size_t i) {
    return (*vehicles_)[i].position > position;
  });
  for (; it != order.end(); ++it) {
    if (exclude && *it == *exclude) continue;
    return *it;
  }
  return std::nullopt;
}

std::size_t LaneIndex::slot_of(std::size_t vehicle, int lane) const {
  const auto& order = lanes_.at(static_cast<std::size_t>(lane));
  auto it = std::lower_bound(order.begin(), order.end(), vehicle, FrontFirst{vehicles_});
  if (it == order.end() || *it != vehicle) {
    // Positions may have been edited in place; fall back to a scan.
    it = std::find(order.begin(), order.end(), vehicle);
    if (it == order.end()) throw std::logic_error("vehicle not indexed in lane");
  }
  return static_cast<std::size_t>(it - order.begin());
}

std::optional<std::size_t> LaneIndex::leader_of(std::size_t vehicle) const {
  const int lane = (*vehicles_)[vehicle].lane;
  const std::size_t slot = slot_of(vehicle, lane);
  if (slot == 0) return std::nullopt;
  return lanes_[static_cast<std::size_t>(lane)][slot - 1];
}

std::optional<std::size_t> LaneIndex::follower_of(std::size_t vehicle) const {
  const int lane = (*vehicles_)[vehicle].lane;
  const auto& order = lanes_[static_cast<std::size_t>(lane)];
  const std::size_t slot = slot_of(vehicle, lane);
  if (slot + 1 >= order.size()) return std::nullopt;
  return order[slot + 1];
}

void LaneIndex::move(std::size_t vehicle, int from_lane) {
  auto& from = lanes_.at(static_cast<std::size_t>(from_lane));
  from.erase(from.begin() + static_cast<std::ptrdiff_t>(slot_of(vehicle, from_lane)));
  auto& to = lanes_.at(static_cast<std::size_t>((*vehicles_)[vehicle].lane));
  to.insert(std::upper_bound(to.begin(), to.end(), vehicle, FrontFirst{vehicles_}), vehicle);
}

}  // namespace gapflow::sim
