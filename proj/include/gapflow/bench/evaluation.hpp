#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gapflow/env/scenario.hpp"
#include "gapflow/rl/ddpg.hpp"
#include "gapflow/sim/metrics.hpp"

namespace gapflow::bench {

/// base: every platoon keeps its default gap. rlpg: the controlled platoon
/// asks the roadside unit for gaps once per decision interval.
enum class Mode { base, rlpg };

std::string_view to_string(Mode mode);
/// Accepts "base" and "rlpg"; throws std::invalid_argument otherwise.
Mode parse_mode(std::string_view text);

struct EvalOptions {
  double horizon = 300.0;         // s of simulated time
  double sample_interval = 1.0;   // s between mean-speed samples
  bool record_trace = false;
};

struct EpisodeMetrics {
  double mean_speed = 0.0;        // time average of the segment mean speed
  double throughput = 0.0;        // veh/h leaving the segment
  double trip_speed = 0.0;        // mean of distance / traversal time over exits
  std::size_t exits = 0;
  std::size_t requests = 0;       // gap advisories applied
  std::uint64_t guard_interventions = 0;
  std::vector<double> speed_series;
  std::vector<sim::TraceSample> trace;
};

/// Runs one episode of `scenario` from an empty road. In rlpg mode the
/// controlled platoon is advised through an in-process roadside unit backed
/// by `agent`; base mode never touches the agent (it may be null).
/// Throws std::invalid_argument for rlpg mode without an agent or when the
/// agent's dimensions do not match the scenario.
EpisodeMetrics evaluate(const env::Scenario& scenario, Mode mode, std::uint64_t seed,
                        std::shared_ptr<const rl::DdpgAgent> agent,
                        const EvalOptions& options = {});

/// Grid over the `length` metres ending at the merge zone end, mainline lanes
/// only, with `dx` / `dt` bins covering the trace time span.
sim::GridSpec merge_region_grid(const env::Scenario& scenario, double horizon,
                                double length = 200.0, double dx = 10.0, double dt = 5.0);

struct BreakdownReport {
  std::size_t below_cells = 0;     // non-missing cells under the threshold
  std::size_t largest_band = 0;    // cells in the largest connected low-speed region
  bool upstream_band = false;      // that region's upstream edge moves upstream
};

/// Connected components use 4-neighbourhood in (x, t). A band propagates
/// upstream when its smallest occupied x bin in the last time bin it spans is
/// below the one in its first, and it has at least `min_cells` cells.
BreakdownReport analyse_breakdown(const sim::SpaceTimeGrid& grid, double threshold,
                                  std::size_t min_cells = 4);

}  // namespace gapflow::bench
