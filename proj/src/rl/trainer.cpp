#include "gapflow/rl/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "gapflow/rl/checkpoint.hpp"

namespace gapflow::rl {

std::uint64_t episode_seed(std::uint64_t base, int episode) {
  // splitmix64 finalizer over (base, episode).
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(episode) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

TrainingLog train(Environment& env, DdpgAgent& agent, const TrainOptions& options) {
  const auto& cfg = agent.config();
  if (env.state_dim() != cfg.state_dim || env.action_dim() != cfg.action_dim) {
    throw std::invalid_argument("environment dimensions do not match the agent");
  }
  if (options.episodes < 0 || options.steps_per_episode <= 0) {
    throw std::invalid_argument("episodes must be >= 0 and steps_per_episode > 0");
  }

  TrainingLog log;
  OUNoise noise(cfg.action_dim, cfg.ou_sigma, cfg.ou_theta, cfg.ou_dt);
  for (int episode = 0; episode < options.episodes; ++episode) {
    noise.reset();
    double total = 0.0;
    int steps = 0;
    try {
      Vector state = env.reset(episode_seed(options.seed, episode));
      for (int t = 0; t < options.steps_per_episode; ++t) {
        const Vector& n = noise.sample(agent.rng());
        const Vector action = select_action(agent.actor(), state, &n);
        StepResult r = env.step(action);
        agent.replay().push(Transition{state, action, r.reward, r.next_state, r.done});
        total += r.reward;
        ++steps;
        if (agent.replay().size() >= cfg.batch_size) {
          const Batch batch = agent.replay().sample(cfg.batch_size, agent.rng());
          critic_update(batch, agent);
          actor_update(batch, agent);
          update_targets(agent);
          ++log.updates;
        }
        if (r.done) break;
        state = std::move(r.next_state);
      }
    } catch (const std::exception& e) {
      throw TrainingError("environment failure in episode " + std::to_string(episode) + ": " +
                          e.what());
    }
    log.episode_rewards.push_back(total);
    log.episode_steps.push_back(steps);
    if (options.on_episode) options.on_episode(episode, total);
    if (!options.checkpoint_path.empty() && options.checkpoint_every > 0 &&
        (episode + 1) % options.checkpoint_every == 0) {
      save_checkpoint(agent, options.checkpoint_path);
    }
  }
  if (!options.checkpoint_path.empty()) save_checkpoint(agent, options.checkpoint_path);
  return log;
}

std::vector<double> moving_average(const std::vector<double>& values, std::size_t window) {
  if (window == 0) throw std::invalid_argument("window must be positive");
  std::vector<double> out;
  out.reserve(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= window) sum -= values[i - window];
    out.push_back(sum / static_cast<double>(std::min(i + 1, window)));
  }
  return out;
}

void write_reward_csv(std::ostream& out, const TrainingLog& log) {
  const auto avg = moving_average(log.episode_rewards, 50);
  out << "episode,cumulative_reward,moving_avg_50\n";
  char buf[96];
  for (std::size_t i = 0; i < avg.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, log.episode_rewards[i], avg[i]);
    out << buf;
  }
}

}  // namespace gapflow::rl
