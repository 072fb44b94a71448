#include <doctest.h>

#include <filesystem>
#include <numeric>
#include <sstream>

#include "gapflow/rl/checkpoint.hpp"
#include "gapflow/rl/toy_env.hpp"
#include "gapflow/rl/trainer.hpp"

using namespace gapflow::rl;

namespace {

DdpgConfig toy_config(std::uint64_t seed) {
  DdpgConfig c;
  c.state_dim = 1;
  c.action_dim = 1;
  c.seed = seed;
  return c;
}

double mean(const std::vector<double>& v, std::size_t from, std::size_t to) {
  return std::accumulate(v.begin() + static_cast<long>(from), v.begin() + static_cast<long>(to), 0.0) /
         static_cast<double>(to - from);
}

TrainOptions options(int episodes, int steps = 300, std::uint64_t seed = 1) {
  TrainOptions o;
  o.episodes = episodes;
  o.steps_per_episode = steps;
  o.seed = seed;
  return o;
}

class FailingEnv : public Environment {
 public:
  explicit FailingEnv(int fail_at) : fail_at_(fail_at) {}
  int state_dim() const override { return 1; }
  int action_dim() const override { return 1; }
  Vector reset(std::uint64_t) override { return Vector::Zero(1); }
  StepResult step(const Vector&) override {
    if (++steps_ == fail_at_) throw std::runtime_error("sensor fault");
    return {Vector::Zero(1), 0.0, false};
  }

 private:
  int fail_at_;
  int steps_ = 0;
};

}  // namespace

TEST_CASE("toy env optimum") {
  ToyGapEnv env;
  env.reset(1);
  Vector a(1);
  a << env.optimal_action();
  StepResult r;
  for (int k = 0; k < 20; ++k) r = env.step(a);
  CHECK(env.gap() == doctest::Approx(22.0).epsilon(1e-4));
  CHECK(r.reward == 1.0);
}

TEST_CASE("zero episodes returns the initial agent") {
  ToyGapEnv env;
  DdpgAgent agent(toy_config(1));
  const std::string before = serialize_checkpoint(agent);
  const TrainingLog log = train(env, agent, options(0));
  CHECK(log.episode_rewards.empty());
  CHECK(log.updates == 0);
  CHECK(serialize_checkpoint(agent) == before);
}

TEST_CASE("every step is stored") {
  ToyGapEnv env;
  DdpgAgent agent(toy_config(2));
  const TrainingLog log = train(env, agent, options(3, 50));
  CHECK(agent.replay().size() == 150);
  CHECK(log.episode_steps == std::vector<int>{50, 50, 50});
  CHECK(log.updates == 150 - 31);
}

TEST_CASE("training is deterministic under a fixed seed") {
  auto run = [] {
    ToyGapEnv env;
    DdpgAgent agent(toy_config(3));
    std::ostringstream csv;
    write_reward_csv(csv, train(env, agent, options(8, 40, 5)));
    return csv.str() + serialize_checkpoint(agent);
  };
  CHECK(run() == run());
}

TEST_CASE("reward log format") {
  TrainingLog log;
  log.episode_rewards = {1.0, 3.0, -2.0};
  std::ostringstream csv;
  write_reward_csv(csv, log);
  CHECK(csv.str() == "episode,cumulative_reward,moving_avg_50\n0,1,1\n1,3,2\n2,-2,0.66666666666666663\n");
  CHECK(moving_average({1, 2, 3, 4}, 2) == std::vector<double>{1, 1.5, 2.5, 3.5});
}

TEST_CASE("the toy task improves over training") {
  ToyGapEnv env;
  DdpgAgent agent(toy_config(4));
  const TrainingLog log = train(env, agent, options(200, 50, 4));
  const auto avg = moving_average(log.episode_rewards, 50);
  CHECK(mean(avg, 150, 200) > mean(avg, 0, 50));
}

TEST_CASE("an environment failure aborts and keeps the last checkpoint") {
  const auto path = std::filesystem::temp_directory_path() / "gapflow_test_trainer.ckpt";
  FailingEnv env(250);
  DdpgAgent agent(toy_config(6));
  TrainOptions opts = options(10, 50);
  opts.checkpoint_path = path.string();
  opts.checkpoint_every = 2;
  CHECK_THROWS_AS(train(env, agent, opts), TrainingError);
  // Checkpointed after episode 4; the fifth episode failed on its last step.
  const DdpgAgent saved = load_checkpoint(path.string());
  CHECK(saved.replay().size() == 200);
  CHECK(agent.replay().size() == 249);
  std::filesystem::remove(path);
}
