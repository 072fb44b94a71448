#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "gapflow/env/observation.hpp"
#include "gapflow/env/scenario.hpp"
#include "gapflow/rl/environment.hpp"
#include "gapflow/sim/world.hpp"

namespace gapflow::env {

/// Fresh world for `scenario` with its flow seed replaced by `seed` and every
/// platoon scheduled. Returns the platoon ids in scenario order.
sim::WorldState start_world(const Scenario& scenario, std::uint64_t seed,
                            std::vector<int>* platoon_ids = nullptr);

/// Index of the first controlled platoon. Throws std::invalid_argument if the
/// scenario has none.
std::size_t controlled_platoon_index(const Scenario& scenario);

/// Simulator ticks per decision step.
int ticks_per_decision(const Scenario& scenario);

/// Optional per-episode perturbation of the scenario, drawn from an rng seeded
/// by the episode seed.
using ScenarioVariation = std::function<Scenario(const Scenario& base, std::mt19937_64& rng)>;

/// Episodic MDP over the merge simulator. One step applies the decoded gaps to
/// the controlled platoon and advances decision_interval of simulated time.
/// Episodes end after env.horizon steps or once the platoon's last member
/// has left the segment.
class MergeEnv : public rl::Environment {
 public:
  explicit MergeEnv(Scenario scenario, ScenarioVariation variation = {});

  int state_dim() const override { return base_.env.state_dim(); }
  int action_dim() const override { return base_.env.action_dim(); }

  /// Runs warm-up ticks until the controlled platoon is on the road. Throws
  /// std::runtime_error if that takes longer than env.warmup_limit.
  rl::Vector reset(std::uint64_t seed) override;

  /// Throws std::logic_error("episode finished") once done.
  rl::StepResult step(const rl::Vector& action) override;

  const sim::WorldState& world() const;
  const Scenario& scenario() const { return active_; }
  /// Null once the platoon has dissolved.
  const platoon::Platoon* controlled_platoon() const;
  int steps_taken() const { return steps_; }
  bool finished() const { return done_; }

 private:
  rl::Vector current_observation() const;
  bool tail_exited() const;

  Scenario base_;
  Scenario active_;
  ScenarioVariation variation_;
  std::optional<sim::WorldState> world_;
  int platoon_id_ = -1;
  std::vector<sim::VehicleId> members_;
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace gapflow::env
