#include "gapflow/env/merge_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gapflow/platoon/platoon.hpp"

namespace gapflow::env {

sim::WorldState start_world(const Scenario& scenario, std::uint64_t seed,
                            std::vector<int>* platoon_ids) {
  sim::SimConfig config = scenario.sim;
  config.flow.seed = seed;
  sim::WorldState world = sim::make_world(config);
  for (const auto& spec : scenario.platoons) {
    const int id = platoon::form_platoon(world, spec);
    if (platoon_ids) platoon_ids->push_back(id);
  }
  return world;
}

std::size_t controlled_platoon_index(const Scenario& scenario) {
  for (std::size_t i = 0; i < scenario.platoons.size(); ++i) {
    if (scenario.platoons[i].controlled) return i;
  }
  throw std::invalid_argument("scenario has no controlled platoon");
}

int ticks_per_decision(const Scenario& scenario) {
  return static_cast<int>(std::lround(scenario.env.decision_interval / scenario.sim.dt));
}

MergeEnv::MergeEnv(Scenario scenario, ScenarioVariation variation)
    : base_(std::move(scenario)), active_(base_), variation_(std::move(variation)) {
  base_.validate();
  controlled_platoon_index(base_);
}

rl::Vector MergeEnv::reset(std::uint64_t seed) {
  active_ = base_;
  if (variation_) {
    std::mt19937_64 rng(seed);
    active_ = variation_(base_, rng);
    active_.validate();
    if (active_.env.state_dim() != base_.env.state_dim()) {
      throw std::logic_error("scenario variation changed the observation size");
    }
  }
  const std::size_t ci = controlled_platoon_index(active_);
  std::vector<int> ids;
  world_ = start_world(active_, seed, &ids);
  platoon_id_ = ids[ci];

  const double dt = active_.sim.dt;
  while (!world_->find_platoon(platoon_id_)) {
    if (world_->time > active_.env.warmup_limit) {
      throw std::runtime_error("controlled platoon not inserted within the warm-up limit");
    }
    sim::advance(*world_, dt);
  }
  members_ = world_->find_platoon(platoon_id_)->member_ids;
  steps_ = 0;
  done_ = false;
  return current_observation();
}

rl::StepResult MergeEnv::step(const rl::Vector& action) {
  if (done_ || !world_) throw std::logic_error("episode finished");
  if (action.size() != action_dim()) throw std::invalid_argument("action dimension mismatch");

  if (auto* p = world_->find_platoon(platoon_id_)) {
    platoon::apply_gap_commands(*p, decode_action(action, p->size(), active_.env.bounds));
  }
  const int ticks = ticks_per_decision(active_);
  for (int i = 0; i < ticks && !tail_exited(); ++i) sim::advance(*world_, active_.sim.dt);
  ++steps_;

  rl::StepResult r;
  r.reward = compute_reward(*world_, active_.env.reward);
  r.done = steps_ >= active_.env.horizon || tail_exited();
  r.next_state = current_observation();
  done_ = r.done;
  return r;
}

const sim::WorldState& MergeEnv::world() const {
  if (!world_) throw std::logic_error("environment not reset");
  return *world_;
}

const platoon::Platoon* MergeEnv::controlled_platoon() const {
  return world_ ? world_->find_platoon(platoon_id_) : nullptr;
}

bool MergeEnv::tail_exited() const { return !world_->find(members_.back()); }

rl::Vector MergeEnv::current_observation() const {
  if (const auto* p = controlled_platoon()) return observe(*world_, *p, active_.env);
  // Dissolved platoon: report whichever members remain, with no gaps.
  std::size_t remaining = 0;
  for (const auto id : members_) remaining += world_->find(id) ? 1 : 0;
  remaining = std::min<std::size_t>(remaining, 1);
  const double pad = active_.platoons[controlled_platoon_index(active_)].default_gap;
  const auto metrics = sim::measure_metrics(*world_, active_.env.reward.delay_window);
  return build_observation(snapshot_of(metrics), remaining, {}, pad, active_.env);
}

}  // namespace gapflow::env
