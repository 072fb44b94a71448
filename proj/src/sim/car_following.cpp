#include "gapflow/sim/car_following.hpp"

#include <algorithm>
#include <cmath>

namespace gapflow::sim {

double desired_gap(double ego_speed, double approach_rate, const CarFollowingParams& params) {
  const double dynamic =
      ego_speed * params.time_headway +
      ego_speed * approach_rate / (2.0 * std::sqrt(params.max_accel * params.comfort_decel));
  return params.min_gap + std::max(0.0, dynamic);
}

double car_following_accel(double ego_speed, double gap, double lead_speed,
                           const CarFollowingParams& params) {
  const double free_term = std::pow(ego_speed / params.desired_speed, params.exponent);
  double interaction = 0.0;
  if (std::isfinite(gap)) {
    if (!(gap > 0.0)) throw std::invalid_argument("invalid gap");
    const double ratio = desired_gap(ego_speed, ego_speed - lead_speed, params) / gap;
    interaction = ratio * ratio;
  }
  const double accel = params.max_accel * (1.0 - free_term - interaction);
  return std::clamp(accel, params.accel_min, params.accel_max);
}

}  // namespace gapflow::sim
