#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "gapflow/rl/ddpg.hpp"
#include "gapflow/rl/environment.hpp"

namespace gapflow::rl {

struct TrainOptions {
  int episodes = 0;
  int steps_per_episode = 300;
  std::uint64_t seed = 1;       // episode e resets the env with episode_seed(seed, e)
  std::string checkpoint_path;  // empty: never checkpoint
  int checkpoint_every = 0;     // episodes; 0 checkpoints only at the end
  std::function<void(int episode, double reward)> on_episode;
};

struct TrainingLog {
  std::vector<double> episode_rewards;
  std::vector<int> episode_steps;
  std::size_t updates = 0;
};

/// Raised when the environment throws mid-training. The agent keeps the
/// state of the last completed step and any checkpoint on disk is left as is.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t episode_seed(std::uint64_t base, int episode);

/// DDPG training loop. Per step: act with OU noise, store the transition,
/// then (once the replay holds a batch) one critic update, one actor update
/// and one soft update of both targets.
TrainingLog train(Environment& env, DdpgAgent& agent, const TrainOptions& options);

/// Trailing mean over up to `window` entries ending at each index.
std::vector<double> moving_average(const std::vector<double>& values, std::size_t window);

/// CSV: episode,cumulative_reward,moving_avg_50
void write_reward_csv(std::ostream& out, const TrainingLog& log);

}  // namespace gapflow::rl
