#pragma once

#include <random>

#include "gapflow/rl/environment.hpp"

namespace gapflow::rl {

/// One-dimensional gap-setpoint task. The action is a normalized setpoint in
/// [-1, 1] mapped onto [gap_min, gap_max]; the gap relaxes toward it at
/// `response` per step. Reward is +1 while |gap - target| < tolerance, else -1.
/// The optimal policy is the constant action that encodes `target`.
struct ToyGapConfig {
  double gap_min = 2.0;
  double gap_max = 30.0;
  double target = 22.0;
  double tolerance = 2.0;
  double response = 0.5;
};

class ToyGapEnv : public Environment {
 public:
  explicit ToyGapEnv(ToyGapConfig config = {});

  int state_dim() const override { return 1; }
  int action_dim() const override { return 1; }
  Vector reset(std::uint64_t seed) override;
  StepResult step(const Vector& action) override;

  double gap() const { return gap_; }
  double optimal_action() const;
  const ToyGapConfig& config() const { return config_; }

 private:
  Vector observe() const;

  ToyGapConfig config_;
  double gap_ = 0.0;
};

}  // namespace gapflow::rl
