#include "gapflow/rl/toy_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gapflow::rl {

ToyGapEnv::ToyGapEnv(ToyGapConfig config) : config_(config) {
  if (!(config_.gap_max > config_.gap_min) || config_.response <= 0 || config_.response > 1 ||
      config_.tolerance <= 0) {
    throw std::invalid_argument("invalid toy environment configuration");
  }
}

Vector ToyGapEnv::reset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> initial(config_.gap_min, config_.gap_max);
  gap_ = initial(rng);
  return observe();
}

StepResult ToyGapEnv::step(const Vector& action) {
  if (action.size() != 1) throw std::invalid_argument("toy env expects one action component");
  const double raw = std::clamp(action(0), -1.0, 1.0);
  const double setpoint = config_.gap_min + (raw + 1.0) / 2.0 * (config_.gap_max - config_.gap_min);
  gap_ += config_.response * (setpoint - gap_);
  const double reward = std::abs(gap_ - config_.target) < config_.tolerance ? 1.0 : -1.0;
  return StepResult{observe(), reward, false};
}

double ToyGapEnv::optimal_action() const {
  return 2.0 * (config_.target - config_.gap_min) / (config_.gap_max - config_.gap_min) - 1.0;
}

Vector ToyGapEnv::observe() const {
  Vector s(1);
  s(0) = (gap_ - config_.gap_min) / (config_.gap_max - config_.gap_min);
  return s;
}

}  // namespace gapflow::rl
