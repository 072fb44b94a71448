#include "gapflow/rl/ou_noise.hpp"

#include <cmath>
#include <stdexcept>

namespace gapflow::rl {

OUNoise::OUNoise(int dim, double sigma, double theta, double dt)
    : x_(Vector::Zero(dim)), sigma_(sigma), theta_(theta), dt_(dt) {
  if (dim <= 0) throw std::invalid_argument("noise dimension must be positive");
  if (sigma < 0 || theta < 0 || dt <= 0) throw std::invalid_argument("invalid OU parameters");
}

void OUNoise::reset() { x_.setZero(); }

const Vector& OUNoise::sample(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double diffusion = sigma_ * std::sqrt(dt_);
  for (Eigen::Index i = 0; i < x_.size(); ++i) {
    x_(i) += theta_ * (0.0 - x_(i)) * dt_ + diffusion * normal(rng);
  }
  return x_;
}

}  // namespace gapflow::rl
