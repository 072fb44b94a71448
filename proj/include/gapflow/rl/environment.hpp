#pragma once

#include <cstdint>

#include "gapflow/rl/dense_net.hpp"

namespace gapflow::rl {

struct StepResult {
  Vector next_state;
  double reward = 0.0;
  bool done = false;
};

/// Episodic environment with a continuous action vector in [-1, 1]^d.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual Vector reset(std::uint64_t seed) = 0;
  virtual StepResult step(const Vector& action) = 0;
};

}  // namespace gapflow::rl
