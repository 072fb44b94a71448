#include "gapflow/rl/ddpg.hpp"

#include <stdexcept>

namespace gapflow::rl {

void DdpgConfig::validate() const {
  if (state_dim <= 0 || action_dim <= 0) throw std::invalid_argument("ddpg: bad dimensions");
  if (lr_actor <= 0 || lr_critic <= 0) throw std::invalid_argument("ddpg: learning rates must be positive");
  if (discount < 0 || discount > 1) throw std::invalid_argument("ddpg: discount outside [0, 1]");
  if (tau < 0 || tau > 1) throw std::invalid_argument("ddpg: tau outside [0, 1]");
  if (batch_size == 0 || replay_capacity < batch_size) {
    throw std::invalid_argument("ddpg: replay capacity must hold a batch");
  }
}

DenseNet make_actor(int state_dim, int action_dim, const std::vector<int>& hidden) {
  std::vector<int> sizes{state_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(action_dim);
  return DenseNet(sizes, Activation::relu, Activation::tanh);
}

DenseNet make_critic(int state_dim, int action_dim, const std::vector<int>& hidden) {
  std::vector<int> sizes{state_dim + action_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return DenseNet(sizes, Activation::relu, Activation::linear);
}

DdpgAgent::DdpgAgent(const DdpgConfig& config)
    : config_(config),
      replay_(config.replay_capacity, config.state_dim, config.action_dim),
      rng_(config.seed) {
  config_.validate();
  actor_ = make_actor(config.state_dim, config.action_dim, config.actor_hidden);
  critic_ = make_critic(config.state_dim, config.action_dim, config.critic_hidden);
  actor_.initialize(rng_);
  critic_.initialize(rng_);
  actor_target_ = actor_;
  critic_target_ = critic_;
  actor_adam_ = AdamState::for_net(actor_);
  critic_adam_ = AdamState::for_net(critic_);
}

DdpgAgent::DdpgAgent(const DdpgAgent& other)
    : config_(other.config_),
      actor_(other.actor_),
      critic_(other.critic_),
      actor_target_(other.actor_target_),
      critic_target_(other.critic_target_),
      actor_adam_(other.actor_adam_),
      critic_adam_(other.critic_adam_),
      replay_(other.replay_),
      rng_(other.rng_),
      inference_count_(other.inference_count_.load()) {}

DdpgAgent& DdpgAgent::operator=(const DdpgAgent& other) {
  if (this != &other) {
    DdpgAgent copy(other);
    *this = std::move(copy);
  }
  return *this;
}

DdpgAgent::DdpgAgent(DdpgAgent&& other) noexcept
    : config_(std::move(other.config_)),
      actor_(std::move(other.actor_)),
      critic_(std::move(other.critic_)),
      actor_target_(std::move(other.actor_target_)),
      critic_target_(std::move(other.critic_target_)),
      actor_adam_(std::move(other.actor_adam_)),
      critic_adam_(std::move(other.critic_adam_)),
      replay_(std::move(other.replay_)),
      rng_(other.rng_),
      inference_count_(other.inference_count_.load()) {}

DdpgAgent& DdpgAgent::operator=(DdpgAgent&& other) noexcept {
  config_ = std::move(other.config_);
  actor_ = std::move(other.actor_);
  critic_ = std::move(other.critic_);
  actor_target_ = std::move(other.actor_target_);
  critic_target_ = std::move(other.critic_target_);
  actor_adam_ = std::move(other.actor_adam_);
  critic_adam_ = std::move(other.critic_adam_);
  replay_ = std::move(other.replay_);
  rng_ = other.rng_;
  inference_count_.store(other.inference_count_.load());
  return *this;
}

Vector DdpgAgent::act(const Vector& state) const {
  inference_count_.fetch_add(1, std::memory_order_relaxed);
  return select_action(actor_, state, nullptr);
}

Vector select_action(const DenseNet& actor, const Vector& state, const Vector* noise) {
  Vector a = actor.evaluate(state);
  if (noise) {
    if (noise->size() != a.size()) throw std::invalid_argument("noise dimension mismatch");
    a += *noise;
  }
  return a.cwiseMax(-1.0).cwiseMin(1.0);
}

namespace {

Matrix stack(const Matrix& states, const Matrix& actions) {
  Matrix input(states.rows() + actions.rows(), states.cols());
  input.topRows(states.rows()) = states;
  input.bottomRows(actions.rows()) = actions;
  return input;
}

}  // namespace

Vector bellman_targets(const Batch& batch, const DenseNet& actor_target,
                       const DenseNet& critic_target, double discount) {
  const Matrix next_actions = actor_target.evaluate(batch.next_states);
  const Matrix next_q = critic_target.evaluate(stack(batch.next_states, next_actions));
  Vector y = batch.rewards;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (batch.done(i) == 0.0) y(i) += discount * next_q(0, i);
  }
  return y;
}

double critic_update(const Batch& batch, DdpgAgent& agent) {
  const auto& cfg = agent.config();
  if (batch.size() == 0) throw std::runtime_error("insufficient samples");
  const Vector y = bellman_targets(batch, agent.actor_target(), agent.critic_target(), cfg.discount);
  const auto fwd = forward(agent.critic(), stack(batch.states, batch.actions));
  const double n = static_cast<double>(batch.size());
  const Matrix residual = fwd.output - y.transpose();  // 1 x N
  const double loss = residual.squaredNorm() / n;
  const Gradients g = backward(agent.critic(), fwd.cache, (2.0 / n) * residual);
  adam_step(agent.critic(), g, agent.critic_adam(), cfg.lr_critic);
  return loss;
}

Matrix critic_action_gradient(const DenseNet& critic, const Matrix& states,
                              const Matrix& actions) {
  const auto fwd = forward(critic, stack(states, actions));
  const Gradients g = backward(critic, fwd.cache, Matrix::Ones(1, states.cols()));
  return g.input.bottomRows(actions.rows());
}

void actor_gradient_step(DenseNet& actor, AdamState& adam, const Matrix& states,
                         const ActionGradient& dq_da, double lr) {
  const auto fwd = forward(actor, states);
  const Matrix grad_q = dq_da(states, fwd.output);
  if (grad_q.rows() != fwd.output.rows() || grad_q.cols() != fwd.output.cols()) {
    throw std::invalid_argument("action gradient shape mismatch");
  }
  // Minimize -mean Q: d(-Q/N)/da.
  const Matrix grad_output = -grad_q / static_cast<double>(states.cols());
  const Gradients g = backward(actor, fwd.cache, grad_output);
  adam_step(actor, g, adam, lr);
}

void actor_update(const Batch& batch, DdpgAgent& agent) {
  if (batch.size() == 0) throw std::runtime_error("insufficient samples");
  const DenseNet& critic = agent.critic();
  actor_gradient_step(
      agent.actor(), agent.actor_adam(), batch.states,
      [&critic](const Matrix& s, const Matrix& a) { return critic_action_gradient(critic, s, a); },
      agent.config().lr_actor);
}

void update_targets(DdpgAgent& agent) {
  soft_update(agent.critic_target(), agent.critic(), agent.config().tau);
  soft_update(agent.actor_target(), agent.actor(), agent.config().tau);
}

}  // namespace gapflow::rl
