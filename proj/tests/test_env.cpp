#include <doctest.h>

#include <cmath>
#include <string>

#include "gapflow/env/merge_env.hpp"
#include "gapflow/env/observation.hpp"
#include "gapflow/env/scenario.hpp"
#include "gapflow/platoon/platoon.hpp"

using namespace gapflow;
using namespace gapflow::env;

namespace {

std::string message_of(const std::string& json) {
  try {
    parse_scenario(json);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return "";
}

Scenario quiet_scenario(int size = 20) {
  Scenario s = default_scenario();
  s.sim.flow.mainline_rate = 0;
  s.sim.flow.ramp_rate = 0;
  s.platoons.resize(1);
  s.platoons[0].size = size;
  s.platoons[0].controlled = true;
  return s;
}

}  // namespace

TEST_CASE("scenario json round trip") {
  const Scenario s = parse_scenario(R"({"flow": {"mainline_rate_vph": 1500}, "platoons": [{"lane": 2, "size": 7, "controlled": true}]})");
  CHECK(s.sim.flow.mainline_rate == 1500.0);
  REQUIRE(s.platoons.size() == 1);
  CHECK(s.platoons[0].size == 7);
  const std::string json = scenario_to_json(s);
  CHECK(scenario_to_json(parse_scenario(json)) == json);
}

TEST_CASE("derived defaults follow the road") {
  const Scenario s = parse_scenario(R"({"road": {"speed_limit_mps": 24, "segment_length_m": 900}})");
  CHECK(s.env.bounds.speed == 24.0);
  CHECK(s.env.reward.l_segment == 900.0);
  CHECK(s.env.reward.v_congestion == doctest::Approx(8.0));
}

TEST_CASE("scenario errors name the line or key") {
  CHECK(message_of("{\n  \"road\": {\n    \"speed_limit_mps\": ,\n  }\n}").find("line 3") != std::string::npos);
  CHECK(message_of(R"({"road": {"speed_limt_mps": 30}})").find("road.speed_limt_mps") != std::string::npos);
  CHECK(message_of(R"({"flow": {"seed": "one"}})").find("flow.seed") != std::string::npos);
  CHECK(message_of(R"({"platoons": [{"lane": 2, "sise": 4}]})").find("platoons[0].sise") != std::string::npos);
  CHECK(message_of(R"({"platoons": {"lane": 2}})").find("platoons") != std::string::npos);
  CHECK(message_of(R"({"gap_controller": {"k_gap": 0.3, "k_speed": 1.0}})").find("invalid scenario") != std::string::npos);
  CHECK(message_of(R"({"road": {"accel_lane_length_m": 800}})").find("invalid scenario") != std::string::npos);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ScenarioError);
}

TEST_CASE("action decoding") {
  rl::Vector raw = rl::Vector::Zero(29);
  raw(0) = -1.0;
  raw(1) = 1.0;
  raw(2) = 0.5;
  raw(3) = 7.0;
  const auto gaps = decode_action(raw, 5);
  REQUIRE(gaps.size() == 4);
  CHECK(gaps[0] == 2.0);
  CHECK(gaps[1] == 30.0);
  CHECK(gaps[2] == doctest::Approx(23.0));
  CHECK(gaps[3] == 30.0);
  CHECK(decode_action(rl::Vector::Zero(29), 2)[0] == doctest::Approx(16.0));
  CHECK(encode_gap(23.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(decode_action(rl::Vector::Zero(3), 6), std::invalid_argument);
}

TEST_CASE("observation layout and normalization") {
  EnvConfig cfg;
  TrafficSnapshot t{10.0, 30.0, 30.0, 15.0};
  std::vector<double> gaps(19, 2.0);
  gaps[0] = 16.0;
  const auto obs = build_observation(t, 20, gaps, 2.0, cfg);
  REQUIRE(obs.size() == 34);
  CHECK(obs(0) == doctest::Approx(10.0 / 60.0));
  CHECK(obs(1) == doctest::Approx(0.5));
  CHECK(obs(2) == doctest::Approx(1.0));
  CHECK(obs(3) == doctest::Approx(0.5));
  CHECK(obs(4) == doctest::Approx(20.0 / 30.0));
  CHECK(obs(5) == doctest::Approx(0.5));
  for (int i = 6; i < 34; ++i) CHECK(obs(i) == 0.0);
  // Out-of-range inputs clamp.
  const auto wild = build_observation({500, 500, 90, -3}, 2, std::vector<double>{80.0}, 2.0, cfg);
  CHECK(wild.maxCoeff() <= 1.0);
  CHECK(wild.minCoeff() >= 0.0);
  CHECK_THROWS_AS(build_observation(t, 31, std::vector<double>(30, 2.0), 2.0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(build_observation(t, 5, std::vector<double>(3, 2.0), 2.0, cfg), std::invalid_argument);
}

TEST_CASE("observation of a constructed scene") {
  Scenario s = quiet_scenario();
  auto w = sim::make_world(s.sim);
  for (int i = 0; i < 33; ++i) {
    sim::Vehicle v;
    v.lane = i % 3;
    v.position = 30.0 + 30.0 * (i / 3);
    v.speed = 30.0;
    v.length = 4.5;
    sim::add_vehicle(w, v);
  }
  platoon::Platoon p;
  p.member_ids = {w.vehicles[3].id, w.vehicles[0].id};  // same lane, 25.5 m apart
  p.gap_setpoints = {2.0};
  const auto obs = observe(w, p, s.env);
  CHECK(obs(0) == doctest::Approx(10.0 / 60.0));
  CHECK(obs(2) == doctest::Approx(1.0));
  CHECK(obs(5) == doctest::Approx((25.5 - 2.0) / 28.0));
}

TEST_CASE("reward threshold") {
  RewardConfig r;  // 1100 m at 10 m/s -> 110 s
  CHECK(r.threshold() == doctest::Approx(110.0));
  CHECK(reward_for_delay(110.0, r) == 1.0);
  CHECK(reward_for_delay((100.0 + 140.0) / 2.0, r) == -1.0);
  CHECK(reward_for_delay(1100.0 / 30.0, r) == 1.0);

  Scenario s = quiet_scenario();
  auto w = sim::make_world(s.sim);
  w.time = 200.0;
  sim::ExitRecord a, b;
  a.entry_time = 50.0;
  a.exit_time = 150.0;
  b.entry_time = 20.0;
  b.exit_time = 160.0;
  w.exits = {a, b};
  CHECK(average_delay(w, s.env.reward) == doctest::Approx(120.0));
  CHECK(compute_reward(w, s.env.reward) == -1.0);
  w.time = 400.0;  // both exits fell out of the window: free-flow fallback
  CHECK(average_delay(w, s.env.reward) == doctest::Approx(1100.0 / 30.0));
}

TEST_CASE("episode mechanics") {
  Scenario s = quiet_scenario();
  s.env.horizon = 5;
  MergeEnv env(s);
  CHECK(env.state_dim() == 34);
  CHECK(env.action_dim() == 29);
  CHECK_THROWS_AS(env.step(rl::Vector::Zero(29)), std::logic_error);

  const auto first = env.reset(3);
  CHECK(env.reset(3) == first);
  CHECK(first(0) == doctest::Approx(20.0 / (60.0 * 3.3)));  // only the platoon on the road
  for (int i = 24; i < 34; ++i) CHECK(first(i) == 0.0);     // padding past 19 gaps

  SUBCASE("each step advances ten ticks and the horizon ends the episode") {
    const auto t0 = env.world().tick;
    for (int k = 1; k <= 5; ++k) {
      const auto r = env.step(rl::Vector::Constant(29, -1.0));
      CHECK(env.world().tick == t0 + 10u * k);
      CHECK(r.done == (k == 5));
    }
    CHECK_THROWS_WITH_AS(env.step(rl::Vector::Zero(29)), "episode finished", std::logic_error);
  }
  SUBCASE("tight gaps stay tight") {
    for (int k = 0; k < 5; ++k) env.step(rl::Vector::Constant(29, -1.0));
    const auto s2 = platoon::platoon_summary(*env.controlled_platoon(), env.world());
    for (double g : s2.actual_gaps) CHECK(g == doctest::Approx(2.0).epsilon(0.05));
  }
  SUBCASE("commanded gaps are applied") {
    env.step(rl::Vector::Zero(29));
    for (double g : env.controlled_platoon()->gap_setpoints) CHECK(g == doctest::Approx(16.0));
  }
  SUBCASE("wrong action size") {
    CHECK_THROWS_AS(env.step(rl::Vector::Zero(4)), std::invalid_argument);
  }
}

TEST_CASE("the episode ends when the platoon tail leaves") {
  Scenario s = quiet_scenario(3);
  MergeEnv env(s);
  env.reset(1);
  int steps = 0;
  rl::StepResult r;
  do {
    r = env.step(rl::Vector::Constant(29, -1.0));
    ++steps;
  } while (!r.done);
  CHECK(steps < 300);
  CHECK(env.controlled_platoon() == nullptr);
}

TEST_CASE("a scenario without a controlled platoon is rejected") {
  Scenario s = quiet_scenario();
  s.platoons[0].controlled = false;
  CHECK_THROWS_AS(MergeEnv{s}, std::invalid_argument);
}
