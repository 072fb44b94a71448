#pragma once

#include <random>

#include "gapflow/rl/dense_net.hpp"

namespace gapflow::rl {

/// Ornstein-Uhlenbeck exploration noise, Euler-discretized:
///   x <- x + theta (0 - x) dt + sigma sqrt(dt) xi,  xi ~ N(0, 1) per dimension.
/// Its stationary variance is sigma^2 / (2 theta - theta^2 dt), which tends to
/// the continuous-time sigma^2 / (2 theta) as theta dt -> 0.
class OUNoise {
 public:
  OUNoise(int dim, double sigma = 0.2, double theta = 0.15, double dt = 1.0);

  void reset();
  /// Advances the process one step and returns the new state.
  const Vector& sample(std::mt19937_64& rng);
  const Vector& state() const { return x_; }

  double sigma() const { return sigma_; }
  double theta() const { return theta_; }
  double dt() const { return dt_; }

 private:
  Vector x_;
  double sigma_;
  double theta_;
  double dt_;
};

}  // namespace gapflow::rl
