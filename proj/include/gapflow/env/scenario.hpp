#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gapflow/platoon/types.hpp"
#include "gapflow/sim/types.hpp"

namespace gapflow::env {

/// Reward threshold inputs: a step earns +1 when the average delay is at most
/// l_segment / v_congestion.
struct RewardConfig {
  double l_segment = 1100.0;
  double v_congestion = 10.0;
  double delay_window = 60.0;

  double threshold() const { return l_segment / v_congestion; }
  void validate() const;
};

/// Min-max normalization bounds of the observation.
struct ObservationBounds {
  double density_mainline = 60.0;  // veh/km/lane
  double density_ramp = 60.0;      // veh/km
  double speed = 30.0;             // m/s
  double gap_min = 2.0;
  double gap_max = 30.0;

  void validate() const;
};

struct EnvConfig {
  double decision_interval = 1.0;  // s of simulated time per env step
  int horizon = 300;               // env steps
  int n_max = 30;                  // largest platoon the policy can address
  double warmup_limit = 300.0;     // s to wait for the controlled platoon
  RewardConfig reward;
  ObservationBounds bounds;

  int state_dim() const { return 5 + (n_max - 1); }
  int action_dim() const { return n_max - 1; }
  void validate() const;
};

struct Scenario {
  sim::SimConfig sim;
  std::vector<platoon::PlatoonSpec> platoons;
  EnvConfig env;

  void validate() const;
};

/// Parse or validation failure. what() names the line (for syntax errors) or
/// the dotted key path (for bad values and unknown keys).
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Built-in scenario: default road and flows with one controlled size-20
/// platoon in the lane adjacent to the acceleration lane.
Scenario default_scenario();

/// Reads a JSON scenario. Missing keys keep their defaults; the speed bound,
/// l_segment and v_congestion default to the road's speed limit, length and
/// a third of the speed limit respectively.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

/// Canonical JSON for a scenario (every field, stable key order).
std::string scenario_to_json(const Scenario& scenario, int indent = 2);

}  // namespace gapflow::env
