#include "gapflow/env/observation.hpp"

#include <algorithm>
#include <stdexcept>

#include "gapflow/platoon/platoon.hpp"

namespace gapflow::env {

namespace {

double unit(double value, double lo, double hi) {
  return std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
}

}  // namespace

TrafficSnapshot snapshot_of(const sim::SegmentMetrics& m) {
  return TrafficSnapshot{m.density_mainline, m.density_ramp, m.mean_speed_mainline,
                         m.mean_speed_ramp};
}

rl::Vector build_observation(const TrafficSnapshot& traffic, std::size_t platoon_size,
                             std::span<const double> gaps, double default_gap,
                             const EnvConfig& config) {
  const auto& b = config.bounds;
  const auto slots = static_cast<std::size_t>(config.n_max - 1);
  if (platoon_size > static_cast<std::size_t>(config.n_max)) {
    throw std::invalid_argument("platoon size " + std::to_string(platoon_size) +
                                " exceeds n_max " + std::to_string(config.n_max));
  }
  if (platoon_size >= 1 && gaps.size() + 1 != platoon_size) {
    throw std::invalid_argument("gap count does not match platoon size");
  }

  rl::Vector s(config.state_dim());
  s(0) = unit(traffic.density_mainline, 0.0, b.density_mainline);
  s(1) = unit(traffic.density_ramp, 0.0, b.density_ramp);
  s(2) = unit(traffic.mean_speed_mainline, 0.0, b.speed);
  s(3) = unit(traffic.mean_speed_ramp, 0.0, b.speed);
  s(4) = unit(static_cast<double>(platoon_size), 0.0, config.n_max);
  const double pad = unit(default_gap, b.gap_min, b.gap_max);
  for (std::size_t i = 0; i < slots; ++i) {
    s(static_cast<Eigen::Index>(5 + i)) = i < gaps.size() ? unit(gaps[i], b.gap_min, b.gap_max) : pad;
  }
  return s;
}

rl::Vector observe(const sim::WorldState& world, const platoon::Platoon& platoon,
                   const EnvConfig& config) {
  const auto metrics = sim::measure_metrics(world, config.reward.delay_window);
  const auto summary = platoon::platoon_summary(platoon, world);
  return build_observation(snapshot_of(metrics), summary.size, summary.actual_gaps,
                           platoon.default_gap, config);
}

std::vector<double> decode_action(const rl::Vector& raw, std::size_t platoon_size,
                                  const ObservationBounds& bounds) {
  if (platoon_size < 2) return {};
  const std::size_t n = platoon_size - 1;
  if (static_cast<std::size_t>(raw.size()) < n) {
    throw std::invalid_argument("action has fewer components than platoon gaps");
  }
  std::vector<double> gaps(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::clamp(raw(static_cast<Eigen::Index>(i)), -1.0, 1.0);
    gaps[i] = bounds.gap_min + (r + 1.0) / 2.0 * (bounds.gap_max - bounds.gap_min);
  }
  return gaps;
}

double encode_gap(double gap, const ObservationBounds& bounds) {
  return 2.0 * (gap - bounds.gap_min) / (bounds.gap_max - bounds.gap_min) - 1.0;
}

double average_delay(const sim::WorldState& world, const RewardConfig& config) {
  const double since = world.time - config.delay_window;
  double sum = 0.0;
  std::size_t n = 0;
  for (auto it = world.exits.rbegin(); it != world.exits.rend() && it->exit_time > since; ++it) {
    if (!it->full_traversal()) continue;
    sum += it->traversal_time();
    ++n;
  }
  if (n > 0) return sum / static_cast<double>(n);
  const auto metrics = sim::measure_metrics(world, config.delay_window);
  return metrics.mean_speed > 0.0 ? config.l_segment / metrics.mean_speed : sim::kInfiniteGap;
}

double reward_for_delay(double delay, const RewardConfig& config) {
  return delay <= config.threshold() ? 1.0 : -1.0;
}

double compute_reward(const sim::WorldState& world, const RewardConfig& config) {
  return reward_for_delay(average_delay(world, config), config);
}

}  // namespace gapflow::env
