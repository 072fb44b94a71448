#include <doctest.h>

#include <cmath>

#include "gapflow/rl/ddpg.hpp"

using namespace gapflow::rl;

namespace {

DdpgConfig small_config() {
  DdpgConfig c;
  c.state_dim = 3;
  c.action_dim = 2;
  c.batch_size = 4;
  c.replay_capacity = 64;
  c.seed = 17;
  return c;
}

void zero(DenseNet& net) {
  for (auto& layer : net.mutable_layers()) {
    layer.weights.setZero();
    layer.bias.setZero();
  }
}

bool identical(const DenseNet& a, const DenseNet& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t l = 0; l < a.layers().size(); ++l) {
    if (a.layers()[l].weights != b.layers()[l].weights || a.layers()[l].bias != b.layers()[l].bias) return false;
  }
  return true;
}

Batch random_batch(int n, int sdim, int adim, std::mt19937_64& rng, bool done = false, double reward = 0.5) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Transition> items(static_cast<std::size_t>(n));
  std::vector<const Transition*> ptrs;
  for (auto& t : items) {
    t.state = Vector::NullaryExpr(sdim, [&] { return u(rng); });
    t.action = Vector::NullaryExpr(adim, [&] { return u(rng); });
    t.next_state = Vector::NullaryExpr(sdim, [&] { return u(rng); });
    t.reward = reward;
    t.done = done;
    ptrs.push_back(&t);
  }
  return Batch::from(ptrs);
}

Vector critic_input(const Vector& s, const Vector& a) {
  Vector x(s.size() + a.size());
  x << s, a;
  return x;
}

}  // namespace

TEST_CASE("architecture and initial target copies") {
  DdpgConfig c = small_config();
  const DdpgAgent agent(c);
  CHECK(agent.actor().sizes() == std::vector<int>{3, 32, 16, 2});
  CHECK(agent.critic().sizes() == std::vector<int>{5, 32, 16, 8, 16, 8, 1});
  CHECK(identical(agent.actor(), agent.actor_target()));
  CHECK(identical(agent.critic(), agent.critic_target()));
  CHECK(agent.actor().layers().back().activation == Activation::tanh);
  CHECK(agent.critic().layers().back().activation == Activation::linear);
}

TEST_CASE("invalid configuration is rejected") {
  DdpgConfig c = small_config();
  c.tau = 1.5;
  CHECK_THROWS_AS(DdpgAgent{c}, std::invalid_argument);
  c = small_config();
  c.replay_capacity = 2;
  CHECK_THROWS_AS(DdpgAgent{c}, std::invalid_argument);
}

TEST_CASE("action selection") {
  DdpgAgent agent(small_config());
  const Vector s = Vector::Constant(3, 0.4);
  SUBCASE("zero actor without noise emits zeros") {
    zero(agent.actor());
    CHECK(select_action(agent.actor(), s).isZero(0.0));
  }
  SUBCASE("noise pushes past the bound and is clamped") {
    zero(agent.actor());
    agent.actor().mutable_layers().back().bias << std::atanh(0.9995), -std::atanh(0.9995);
    const Vector noise = Vector::Constant(2, 0.3);
    const Vector a = select_action(agent.actor(), s, &noise);
    CHECK(a(0) == 1.0);
    CHECK(a(1) == doctest::Approx(-0.6995));
  }
  SUBCASE("evaluation is deterministic and counted") {
    const auto before = agent.inference_count();
    CHECK(agent.act(s) == agent.act(s));
    CHECK(agent.inference_count() == before + 2);
  }
  SUBCASE("huge noise stays within bounds") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> wild(0.0, 50.0);
    for (int k = 0; k < 200; ++k) {
      const Vector noise = Vector::NullaryExpr(2, [&] { return wild(rng); });
      const Vector a = select_action(agent.actor(), s, &noise);
      CHECK(a.cwiseAbs().maxCoeff() <= 1.0);
    }
  }
}

TEST_CASE("bellman targets") {
  DdpgAgent agent(small_config());
  std::mt19937_64 rng(2);
  const Batch b = random_batch(8, 3, 2, rng);
  SUBCASE("zero discount reduces targets to rewards exactly") {
    CHECK(bellman_targets(b, agent.actor_target(), agent.critic_target(), 0.0) == b.rewards);
  }
  SUBCASE("terminal transitions drop the bootstrap term") {
    const Batch t = random_batch(8, 3, 2, rng, true, -1.0);
    CHECK(bellman_targets(t, agent.actor_target(), agent.critic_target(), 0.99) == t.rewards);
  }
  SUBCASE("non-terminal targets add the discounted target value") {
    const Vector y = bellman_targets(b, agent.actor_target(), agent.critic_target(), 0.99);
    for (int i = 0; i < 8; ++i) {
      const Vector s1 = b.next_states.col(i);
      const Vector a1 = agent.actor_target().evaluate(s1);
      const double q = agent.critic_target().evaluate(critic_input(s1, a1))(0);
      CHECK(y(i) == doctest::Approx(b.rewards(i) + 0.99 * q).epsilon(1e-12));
    }
  }
}

TEST_CASE("critic loss") {
  SUBCASE("terminal +1 rewards against a zero critic give unit loss") {
    DdpgAgent agent(small_config());
    zero(agent.critic());
    std::mt19937_64 rng(3);
    CHECK(critic_update(random_batch(4, 3, 2, rng, true, 1.0), agent) == doctest::Approx(1.0));
  }
  SUBCASE("single transition matches (y - Q)^2") {
    DdpgAgent agent(small_config());
    std::mt19937_64 rng(4);
    const Batch b = random_batch(1, 3, 2, rng, false, 0.25);
    const Vector s = b.states.col(0), a = b.actions.col(0), s1 = b.next_states.col(0);
    const double q = agent.critic().evaluate(critic_input(s, a))(0);
    const double q1 = agent.critic_target().evaluate(critic_input(s1, agent.actor_target().evaluate(s1)))(0);
    const double y = 0.25 + 0.99 * q1;
    const DenseNet before = agent.critic();
    CHECK(critic_update(b, agent) == doctest::Approx((y - q) * (y - q)).epsilon(1e-12));
    CHECK_FALSE(identical(before, agent.critic()));
    CHECK(agent.critic().all_finite());
  }
  SUBCASE("repeated updates reduce the loss on a fixed batch") {
    DdpgConfig c = small_config();
    c.discount = 0.0;
    DdpgAgent agent(c);
    std::mt19937_64 rng(5);
    const Batch b = random_batch(16, 3, 2, rng);
    const double first = critic_update(b, agent);
    double last = first;
    for (int k = 0; k < 300; ++k) last = critic_update(b, agent);
    CHECK(last < 0.1 * first);
  }
  SUBCASE("an underfull replay cannot provide a batch") {
    DdpgAgent agent(small_config());
    CHECK_THROWS_WITH_AS(agent.replay().sample(4, agent.rng()), "insufficient samples", std::runtime_error);
  }
}

TEST_CASE("critic action gradient matches finite differences") {
  DdpgAgent agent(small_config());
  std::mt19937_64 rng(6);
  const Batch b = random_batch(5, 3, 2, rng);
  const Matrix g = critic_action_gradient(agent.critic(), b.states, b.actions);
  const double h = 1e-5;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 2; ++j) {
      Vector up = b.actions.col(i), down = up;
      up(j) += h;
      down(j) -= h;
      const double fd = (agent.critic().evaluate(critic_input(b.states.col(i), up))(0) -
                         agent.critic().evaluate(critic_input(b.states.col(i), down))(0)) / (2 * h);
      CHECK(g(j, i) == doctest::Approx(fd).epsilon(1e-4).scale(1e-6));
    }
  }
}

TEST_CASE("actor updates") {
  SUBCASE("synthetic critic -a^2 drives the policy to zero") {
    DenseNet actor = make_actor(1, 1, {8});
    std::mt19937_64 rng(7);
    actor.initialize(rng, 1.0);
    actor.mutable_layers().back().bias(0) = 1.0;
    AdamState adam = AdamState::for_net(actor);
    Matrix states(1, 16);
    for (int i = 0; i < 16; ++i) states(0, i) = -1.0 + 2.0 * i / 15.0;
    const double start = actor.evaluate(states).cwiseAbs().maxCoeff();
    for (int k = 0; k < 2000; ++k) {
      actor_gradient_step(actor, adam, states, [](const Matrix&, const Matrix& a) { return Matrix(-2.0 * a); }, 1e-2);
    }
    CHECK(start > 0.5);
    CHECK(actor.evaluate(states).cwiseAbs().maxCoeff() < 0.02);
  }
  SUBCASE("zero critic leaves the actor unchanged") {
    DdpgAgent agent(small_config());
    zero(agent.critic());
    const DenseNet before = agent.actor();
    std::mt19937_64 rng(8);
    actor_update(random_batch(4, 3, 2, rng), agent);
    CHECK(identical(before, agent.actor()));
  }
  SUBCASE("a small step does not lower mean Q and leaves the critic alone") {
    DdpgConfig c = small_config();
    c.lr_actor = 1e-5;
    DdpgAgent agent(c);
    std::mt19937_64 rng(9);
    const Batch b = random_batch(32, 3, 2, rng);
    auto mean_q = [&] {
      const Matrix a = agent.actor().evaluate(b.states);
      Matrix x(5, 32);
      x.topRows(3) = b.states;
      x.bottomRows(2) = a;
      return agent.critic().evaluate(x).mean();
    };
    const DenseNet critic = agent.critic();
    const double before = mean_q();
    actor_update(b, agent);
    CHECK(mean_q() >= before);
    CHECK(identical(critic, agent.critic()));
  }
}

TEST_CASE("target update uses the configured tau") {
  DdpgConfig c = small_config();
  c.tau = 0.001;
  DdpgAgent agent(c);
  std::mt19937_64 rng(10);
  agent.critic().initialize(rng);
  agent.actor().initialize(rng);
  const DenseNet old_actor = agent.actor_target();
  update_targets(agent);
  const auto& got = agent.actor_target().layers()[0].weights;
  const auto& online = agent.actor().layers()[0].weights;
  const auto& prev = old_actor.layers()[0].weights;
  for (int i = 0; i < got.size(); ++i) {
    CHECK(got.data()[i] == 0.001 * online.data()[i] + (1 - 0.001) * prev.data()[i]);
  }
}
