#pragma once

#include <cstdint>
#include <vector>

#include "gapflow/rl/dense_net.hpp"

namespace gapflow::rl {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First and second moment estimates, shaped like the network they update.
struct AdamState {
  std::vector<Matrix> m_weights, v_weights;
  std::vector<Vector> m_bias, v_bias;
  std::int64_t step = 0;

  static AdamState for_net(const DenseNet& net);
  bool matches(const DenseNet& net) const;
};

/// One bias-corrected Adam step descending `grads`.
/// Throws std::invalid_argument("non-finite gradient") if any gradient entry
/// is NaN or infinite, and on shape mismatch.
void adam_step(DenseNet& net, const Gradients& grads, AdamState& state, double lr,
               const AdamConfig& config = {});

}  // namespace gapflow::rl
