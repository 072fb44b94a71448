#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "gapflow/rl/adam.hpp"
#include "gapflow/rl/dense_net.hpp"
#include "gapflow/rl/ou_noise.hpp"
#include "gapflow/rl/replay_buffer.hpp"

namespace gapflow::rl {

struct DdpgConfig {
  int state_dim = 1;
  int action_dim = 1;
  std::vector<int> actor_hidden{32, 16};
  std::vector<int> critic_hidden{32, 16, 8, 16, 8};
  double lr_actor = 1e-3;
  double lr_critic = 1e-3;
  double discount = 0.99;
  double tau = 1e-3;
  std::size_t batch_size = 32;
  std::size_t replay_capacity = 50000;
  double ou_sigma = 0.2;
  double ou_theta = 0.15;
  double ou_dt = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Actor, critic, their target copies, optimizer state and replay memory.
/// The critic sees [state; action] stacked at its input.
class DdpgAgent {
 public:
  explicit DdpgAgent(const DdpgConfig& config);
  DdpgAgent(const DdpgAgent& other);
  DdpgAgent& operator=(const DdpgAgent& other);
  DdpgAgent(DdpgAgent&& other) noexcept;
  DdpgAgent& operator=(DdpgAgent&& other) noexcept;

  const DdpgConfig& config() const { return config_; }

  DenseNet& actor() { return actor_; }
  const DenseNet& actor() const { return actor_; }
  DenseNet& critic() { return critic_; }
  const DenseNet& critic() const { return critic_; }
  DenseNet& actor_target() { return actor_target_; }
  const DenseNet& actor_target() const { return actor_target_; }
  DenseNet& critic_target() { return critic_target_; }
  const DenseNet& critic_target() const { return critic_target_; }
  AdamState& actor_adam() { return actor_adam_; }
  const AdamState& actor_adam() const { return actor_adam_; }
  AdamState& critic_adam() { return critic_adam_; }
  const AdamState& critic_adam() const { return critic_adam_; }
  ReplayBuffer& replay() { return replay_; }
  const ReplayBuffer& replay() const { return replay_; }
  std::mt19937_64& rng() { return rng_; }
  const std::mt19937_64& rng() const { return rng_; }

  /// Noise-free policy output, clamped to [-1, 1]. Safe for concurrent use.
  Vector act(const Vector& state) const;
  std::uint64_t inference_count() const { return inference_count_.load(); }

 private:
  DdpgConfig config_;
  DenseNet actor_, critic_, actor_target_, critic_target_;
  AdamState actor_adam_, critic_adam_;
  ReplayBuffer replay_;
  std::mt19937_64 rng_;
  mutable std::atomic<std::uint64_t> inference_count_{0};
};

DenseNet make_actor(int state_dim, int action_dim, const std::vector<int>& hidden);
DenseNet make_critic(int state_dim, int action_dim, const std::vector<int>& hidden);

/// mu(s) + noise, clamped componentwise to [-1, 1]. `noise` may be null.
Vector select_action(const DenseNet& actor, const Vector& state, const Vector* noise = nullptr);

/// y_i = r_i + discount * Q'(s'_i, mu'(s'_i)), without the bootstrap term where
/// done_i is set.
Vector bellman_targets(const Batch& batch, const DenseNet& actor_target,
                       const DenseNet& critic_target, double discount);

/// One Adam step on the critic minimizing mean (y_i - Q(s_i, a_i))^2.
/// Returns the loss before the step.
double critic_update(const Batch& batch, DdpgAgent& agent);

/// dQ/da for every column of (states, actions).
Matrix critic_action_gradient(const DenseNet& critic, const Matrix& states,
                              const Matrix& actions);

/// dQ/da evaluated at (states, actions); returns one column per sample.
using ActionGradient = std::function<Matrix(const Matrix& states, const Matrix& actions)>;

/// One Adam step on the actor along the sampled deterministic policy
/// gradient (1/N) sum dQ/da * dmu/dtheta, i.e. descending -mean Q(s, mu(s)).
void actor_gradient_step(DenseNet& actor, AdamState& adam, const Matrix& states,
                         const ActionGradient& dq_da, double lr);

/// actor_gradient_step against the agent's online critic, which is left
/// untouched.
void actor_update(const Batch& batch, DdpgAgent& agent);

/// Soft-updates both target networks with the agent's tau.
void update_targets(DdpgAgent& agent);

}  // namespace gapflow::rl
