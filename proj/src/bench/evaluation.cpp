#include "gapflow/bench/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gapflow/env/merge_env.hpp"
#include "gapflow/env/observation.hpp"
#include "gapflow/platoon/platoon.hpp"
#include "gapflow/rsu/advisor.hpp"
#include "gapflow/rsu/transport.hpp"
#include "gapflow/sim/world.hpp"

namespace gapflow::bench {

std::string_view to_string(Mode mode) { return mode == Mode::base ? "base" : "rlpg"; }

Mode parse_mode(std::string_view text) {
  if (text == "base") return Mode::base;
  if (text == "rlpg") return Mode::rlpg;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "' (expected base or rlpg)");
}

namespace {

int controlled_id(const env::Scenario& scenario, const std::vector<int>& ids) {
  for (std::size_t i = 0; i < scenario.platoons.size(); ++i) {
    if (scenario.platoons[i].controlled) return ids.at(i);
  }
  return -1;
}

rsu::GapRequest make_request(const platoon::Platoon& p, const sim::WorldState& world) {
  const auto summary = platoon::platoon_summary(p, world);
  rsu::GapRequest req;
  req.platoon_id = p.id;
  req.leader_position = summary.leader_position;
  req.leader_speed = summary.leader_speed;
  req.size = static_cast<int>(summary.size);
  req.current_gaps = summary.actual_gaps;
  req.timestamp_us = static_cast<std::int64_t>(std::llround(world.time * 1e6));
  return req;
}

}  // namespace

EpisodeMetrics evaluate(const env::Scenario& scenario, Mode mode, std::uint64_t seed,
                        std::shared_ptr<const rl::DdpgAgent> agent, const EvalOptions& options) {
  scenario.validate();
  if (options.horizon <= 0 || options.sample_interval <= 0) {
    throw std::invalid_argument("evaluation horizon and sample interval must be positive");
  }
  if (mode == Mode::rlpg) {
    if (!agent) throw std::invalid_argument("rlpg mode needs a trained agent");
    if (agent->config().state_dim != scenario.env.state_dim() ||
        agent->config().action_dim != scenario.env.action_dim()) {
      throw std::invalid_argument("agent dimensions do not match the scenario n_max");
    }
  }

  std::vector<int> ids;
  sim::WorldState world = env::start_world(scenario, seed, &ids);
  const int target = mode == Mode::rlpg ? controlled_id(scenario, ids) : -1;

  std::unique_ptr<rsu::Client> client;
  if (target >= 0) {
    const double window = scenario.env.reward.delay_window;
    auto handler = rsu::make_handler(agent, scenario.env, [&world, window] {
      return env::snapshot_of(sim::measure_metrics(world, window));
    });
    client = std::make_unique<rsu::InProcessClient>(std::move(handler));
  }

  const double dt = scenario.sim.dt;
  const auto ticks = static_cast<std::uint64_t>(std::llround(options.horizon / dt));
  const auto per_decision = static_cast<std::uint64_t>(env::ticks_per_decision(scenario));
  const auto per_sample =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(options.sample_interval / dt)));

  EpisodeMetrics out;
  for (std::uint64_t k = 0; k < ticks; ++k) {
    if (client && k % per_decision == 0) {
      if (auto* p = world.find_platoon(target); p && p->size() >= 2) {
        const auto response = client->request_gaps(make_request(*p, world));
        platoon::apply_gap_commands(*p, response.advised_gaps);
        ++out.requests;
      }
    }
    sim::advance(world, dt);
    if (options.record_trace) sim::record_trace(world, out.trace);
    if ((k + 1) % per_sample == 0) {
      out.speed_series.push_back(sim::measure_metrics(world, scenario.env.reward.delay_window).mean_speed);
    }
  }

  double sum = 0.0;
  for (const double v : out.speed_series) sum += v;
  out.mean_speed = out.speed_series.empty() ? 0.0 : sum / static_cast<double>(out.speed_series.size());

  const double length = scenario.sim.road.segment_length;
  double trip = 0.0;
  for (const auto& e : world.exits) {
    if (e.traversal_time() > 0) trip += (length - std::max(e.entry_position, 0.0)) / e.traversal_time();
  }
  out.exits = world.exits.size();
  out.trip_speed = out.exits == 0 ? 0.0 : trip / static_cast<double>(out.exits);
  out.throughput = static_cast<double>(out.exits) * 3600.0 / options.horizon;
  out.guard_interventions = world.counters.guard_interventions;
  return out;
}

sim::GridSpec merge_region_grid(const env::Scenario& scenario, double horizon, double length,
                                double dx, double dt) {
  if (length <= 0 || dx <= 0 || dt <= 0 || horizon <= 0) {
    throw std::invalid_argument("grid extents must be positive");
  }
  sim::GridSpec spec;
  spec.x_end = scenario.sim.road.merge_zone_end();
  spec.x_start = std::max(0.0, spec.x_end - length);
  spec.t_start = 0.0;
  spec.t_end = horizon;
  spec.nx = static_cast<std::size_t>(std::max(1.0, std::round((spec.x_end - spec.x_start) / dx)));
  spec.nt = static_cast<std::size_t>(std::max(1.0, std::round(horizon / dt)));
  spec.include_ramp = false;
  return spec;
}

BreakdownReport analyse_breakdown(const sim::SpaceTimeGrid& grid, double threshold,
                                  std::size_t min_cells) {
  BreakdownReport report;
  const std::size_t nx = grid.cells.size();
  const std::size_t nt = nx == 0 ? 0 : grid.cells[0].size();
  auto low = [&](std::size_t i, std::size_t t) {
    const auto& c = grid.cells[i][t];
    return !c.missing() && c.mean_speed < threshold;
  };
  std::vector<std::vector<bool>> seen(nx, std::vector<bool>(nt, false));
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t t = 0; t < nt; ++t) {
      if (low(i, t)) ++report.below_cells;
    }
  }
  for (std::size_t i0 = 0; i0 < nx; ++i0) {
    for (std::size_t t0 = 0; t0 < nt; ++t0) {
      if (seen[i0][t0] || !low(i0, t0)) continue;
      // Flood fill; track the most upstream bin at each time bin touched.
      std::vector<std::pair<std::size_t, std::size_t>> stack{{i0, t0}};
      seen[i0][t0] = true;
      std::size_t cells = 0;
      std::size_t t_first = nt, t_last = 0;
      std::vector<std::size_t> upstream(nt, nx);
      while (!stack.empty()) {
        const auto [i, t] = stack.back();
        stack.pop_back();
        ++cells;
        t_first = std::min(t_first, t);
        t_last = std::max(t_last, t);
        upstream[t] = std::min(upstream[t], i);
        const std::pair<long, long> steps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& [di, dtb] : steps) {
          const long ni = static_cast<long>(i) + di;
          const long nt2 = static_cast<long>(t) + dtb;
          if (ni < 0 || nt2 < 0 || ni >= static_cast<long>(nx) || nt2 >= static_cast<long>(nt)) continue;
          const auto ui = static_cast<std::size_t>(ni);
          const auto ut = static_cast<std::size_t>(nt2);
          if (!seen[ui][ut] && low(ui, ut)) {
            seen[ui][ut] = true;
            stack.emplace_back(ui, ut);
          }
        }
      }
      report.largest_band = std::max(report.largest_band, cells);
      if (cells >= min_cells && t_last > t_first && upstream[t_last] < upstream[t_first]) {
        report.upstream_band = true;
      }
    }
  }
  return report;
}

}  // namespace gapflow::bench
