#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gapflow/bench/evaluation.hpp"
#include "gapflow/env/merge_env.hpp"
#include "gapflow/env/scenario.hpp"
#include "gapflow/rl/ddpg.hpp"
#include "gapflow/rl/trainer.hpp"
#include "gapflow/rsu/latency.hpp"

namespace gapflow::bench {

struct ExperimentConfig {
  env::Scenario scenario = env::default_scenario();
  int repetitions = 10;
  std::uint64_t seed = 1;
  EvalOptions eval;
  unsigned threads = 0;  // 0: one per hardware thread

  /// Throws std::invalid_argument if repetitions < 1.
  void validate() const;
};

/// Seed of repetition r; distinct for distinct r under one base seed.
std::uint64_t repetition_seed(std::uint64_t base, int repetition);

/// Copy of `scenario` with every platoon resized to `size`. Sizes below 2
/// remove all platoons (the no-platoon reference).
env::Scenario with_platoon_size(const env::Scenario& scenario, int size);

enum class SweepKind { density, merge_length, assertiveness };

std::string_view to_string(SweepKind kind);
/// Accepts "density", "merge-length" and "assertiveness".
SweepKind parse_sweep_kind(std::string_view text);

/// density: ramp injection interval in s (rate = 3600 / value).
/// merge_length: length of the acceleration lane in m.
/// assertiveness: assertiveness of merging vehicles.
env::Scenario apply_sweep_value(const env::Scenario& scenario, SweepKind kind, double value);
std::vector<double> default_sweep_values(SweepKind kind);

struct CellKey {
  double value = 0.0;
  Mode mode = Mode::base;
  int platoon_size = 0;

  bool operator==(const CellKey&) const = default;
};

struct RunRecord {
  CellKey cell;
  int repetition = 0;
  std::uint64_t seed = 0;
  double mean_speed = 0.0;
  double throughput = 0.0;
  double trip_speed = 0.0;
  std::size_t requests = 0;
};

struct CellSummary {
  CellKey cell;
  int repetitions = 0;
  double mean_speed = 0.0;
  double std_speed = 0.0;  // sample standard deviation, 0 for one repetition
  double mean_throughput = 0.0;
  double std_throughput = 0.0;
  std::optional<double> pct_change;  // rlpg cells: 100 (rlpg - base) / base
};

struct SweepResult {
  std::string variable;
  std::vector<RunRecord> runs;      // cell-major, repetitions in order
  std::vector<CellSummary> cells;   // in sweep order

  /// Throws std::out_of_range if the cell was not run.
  const CellSummary& cell(double value, Mode mode, int platoon_size) const;
};

/// Aggregates runs into cells (first-seen order) and fills pct_change for
/// rlpg cells that have a base counterpart.
std::vector<CellSummary> summarize(const std::vector<RunRecord>& runs);

/// Base-mode speed for each platoon size in `sizes`.
SweepResult run_motivation(const ExperimentConfig& config, const std::vector<int>& sizes);

/// Full factorial over values x sizes x modes x repetitions. Throws
/// std::invalid_argument when rlpg is requested without an agent.
SweepResult run_sweep(const ExperimentConfig& config, SweepKind kind,
                      const std::vector<double>& values, const std::vector<int>& sizes,
                      const std::vector<Mode>& modes,
                      std::shared_ptr<const rl::DdpgAgent> agent);

struct SpacetimeResult {
  Mode mode = Mode::base;
  sim::SpaceTimeGrid grid;
  BreakdownReport breakdown;
  double mean_speed = 0.0;
};

/// One traced episode binned over the 200 m ending at the merge zone end.
/// The breakdown threshold is the scenario's v_congestion.
SpacetimeResult run_spacetime(const env::Scenario& scenario, Mode mode, std::uint64_t seed,
                              std::shared_ptr<const rl::DdpgAgent> agent,
                              const EvalOptions& options = {});

/// Compute delays (us) of `n` randomized valid requests served by
/// handle_request.
std::vector<double> measure_latency(const rl::DdpgAgent& agent, const env::Scenario& scenario,
                                    int n, std::uint64_t seed);

struct TrainConfig {
  env::Scenario scenario = env::default_scenario();
  rl::DdpgConfig ddpg;     // state/action sizes are taken from the scenario
  int episodes = 300;
  std::uint64_t seed = 1;
  bool randomize = true;   // vary demand, geometry and platoon size per episode
  std::vector<int> sizes{10, 20, 30};
  std::string checkpoint_path;
  int checkpoint_every = 0;
  std::function<void(int, double)> on_episode;
};

/// Per-episode scenario perturbation used for training: ramp rate scaled by
/// [0.5, 1.5], acceleration lane in [100, 250] m, merging assertiveness in
/// [0.25, 1.4] and one of `sizes` for every platoon.
env::ScenarioVariation training_variation(std::vector<int> sizes);

struct TrainOutcome {
  rl::DdpgAgent agent;
  rl::TrainingLog log;
};

TrainOutcome train_policy(const TrainConfig& config);

}  // namespace gapflow::bench
