#include "gapflow/bench/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>
#include <variant>

#include "gapflow/rsu/advisor.hpp"

namespace gapflow::bench {

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  scenario.validate();
}

std::uint64_t repetition_seed(std::uint64_t base, int repetition) {
  return rl::episode_seed(base ^ 0x5eedba5e5eedba5eULL, repetition);
}

env::Scenario with_platoon_size(const env::Scenario& scenario, int size) {
  env::Scenario out = scenario;
  if (size < 2) {
    out.platoons.clear();
    return out;
  }
  for (auto& p : out.platoons) p.size = size;
  return out;
}

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::density: return "density";
    case SweepKind::merge_length: return "merge-length";
    case SweepKind::assertiveness: return "assertiveness";
  }
  return "unknown";
}

SweepKind parse_sweep_kind(std::string_view text) {
  if (text == "density") return SweepKind::density;
  if (text == "merge-length" || text == "merge_length") return SweepKind::merge_length;
  if (text == "assertiveness") return SweepKind::assertiveness;
  throw std::invalid_argument("unknown sweep kind '" + std::string(text) +
                              "' (expected density, merge-length or assertiveness)");
}

env::Scenario apply_sweep_value(const env::Scenario& scenario, SweepKind kind, double value) {
  env::Scenario out = scenario;
  switch (kind) {
    case SweepKind::density:
      if (value <= 0) throw std::invalid_argument("injection interval must be positive");
      out.sim.flow.ramp_rate = 3600.0 / value;
      break;
    case SweepKind::merge_length:
      out.sim.road.accel_lane_length = value;
      break;
    case SweepKind::assertiveness:
      out.sim.lane_change.merging_assertiveness = value;
      break;
  }
  out.validate();
  return out;
}

std::vector<double> default_sweep_values(SweepKind kind) {
  switch (kind) {
    case SweepKind::density: return {1.5, 2.0, 3.0, 4.0};
    case SweepKind::merge_length: return {100.0, 150.0, 200.0, 250.0};
    case SweepKind::assertiveness: return {0.25, 0.5, 1.0, 1.4};
  }
  return {};
}

const CellSummary& SweepResult::cell(double value, Mode mode, int platoon_size) const {
  const CellKey key{value, mode, platoon_size};
  for (const auto& c : cells) {
    if (c.cell == key) return c;
  }
  throw std::out_of_range("no such sweep cell");
}

namespace {

void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  for (const double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
}

struct Job {
  env::Scenario scenario;
  CellKey cell;
  int repetition = 0;
  std::uint64_t seed = 0;
};

// Runs jobs on a small worker pool; results land in job order.
std::vector<RunRecord> run_jobs(const std::vector<Job>& jobs, const ExperimentConfig& config,
                                const std::shared_ptr<const rl::DdpgAgent>& agent) {
  std::vector<RunRecord> out(jobs.size());
  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        const Job& job = jobs[i];
        const auto m = evaluate(job.scenario, job.cell.mode, job.seed,
                                job.cell.mode == Mode::rlpg ? agent : nullptr, config.eval);
        out[i] = RunRecord{job.cell, job.repetition, job.seed, m.mean_speed, m.throughput,
                           m.trip_speed, m.requests};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs.size());
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace

std::vector<CellSummary> summarize(const std::vector<RunRecord>& runs) {
  std::vector<CellKey> order;
  for (const auto& r : runs) {
    if (std::find(order.begin(), order.end(), r.cell) == order.end()) order.push_back(r.cell);
  }
  std::vector<CellSummary> cells;
  for (const auto& key : order) {
    std::vector<double> speeds, flows;
    for (const auto& r : runs) {
      if (r.cell == key) {
        speeds.push_back(r.mean_speed);
        flows.push_back(r.throughput);
      }
    }
    CellSummary c;
    c.cell = key;
    c.repetitions = static_cast<int>(speeds.size());
    mean_std(speeds, c.mean_speed, c.std_speed);
    mean_std(flows, c.mean_throughput, c.std_throughput);
    cells.push_back(c);
  }
  for (auto& c : cells) {
    if (c.cell.mode != Mode::rlpg) continue;
    for (const auto& b : cells) {
      if (b.cell.mode == Mode::base && b.cell.value == c.cell.value &&
          b.cell.platoon_size == c.cell.platoon_size && b.mean_speed != 0.0) {
        c.pct_change = 100.0 * (c.mean_speed - b.mean_speed) / b.mean_speed;
      }
    }
  }
  return cells;
}

SweepResult run_motivation(const ExperimentConfig& config, const std::vector<int>& sizes) {
  config.validate();
  std::vector<Job> jobs;
  for (const int size : sizes) {
    const auto scenario = with_platoon_size(config.scenario, size);
    for (int r = 0; r < config.repetitions; ++r) {
      jobs.push_back(Job{scenario, CellKey{static_cast<double>(size), Mode::base, size}, r,
                         repetition_seed(config.seed, r)});
    }
  }
  SweepResult result;
  result.variable = "platoon_size";
  result.runs = run_jobs(jobs, config, nullptr);
  result.cells = summarize(result.runs);
  return result;
}

SweepResult run_sweep(const ExperimentConfig& config, SweepKind kind,
                      const std::vector<double>& values, const std::vector<int>& sizes,
                      const std::vector<Mode>& modes, std::shared_ptr<const rl::DdpgAgent> agent) {
  config.validate();
  if (!agent && std::find(modes.begin(), modes.end(), Mode::rlpg) != modes.end()) {
    throw std::invalid_argument("rlpg mode requires a checkpoint");
  }
  std::vector<Job> jobs;
  for (const double value : values) {
    const auto varied = apply_sweep_value(config.scenario, kind, value);
    for (const int size : sizes) {
      const auto scenario = with_platoon_size(varied, size);
      for (const Mode mode : modes) {
        for (int r = 0; r < config.repetitions; ++r) {
          jobs.push_back(Job{scenario, CellKey{value, mode, size}, r, repetition_seed(config.seed, r)});
        }
      }
    }
  }
  SweepResult result;
  result.variable = std::string(to_string(kind));
  result.runs = run_jobs(jobs, config, agent);
  result.cells = summarize(result.runs);
  return result;
}

SpacetimeResult run_spacetime(const env::Scenario& scenario, Mode mode, std::uint64_t seed,
                              std::shared_ptr<const rl::DdpgAgent> agent, const EvalOptions& options) {
  EvalOptions traced = options;
  traced.record_trace = true;
  const auto m = evaluate(scenario, mode, seed, mode == Mode::rlpg ? agent : nullptr, traced);
  SpacetimeResult out;
  out.mode = mode;
  out.mean_speed = m.mean_speed;
  out.grid = sim::space_time_grid(m.trace, merge_region_grid(scenario, traced.horizon),
                                  scenario.sim.road.ramp_lane());
  out.breakdown = analyse_breakdown(out.grid, scenario.env.reward.v_congestion);
  return out;
}

std::vector<double> measure_latency(const rl::DdpgAgent& agent, const env::Scenario& scenario,
                                    int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("latency sample count must be positive");
  const auto& cfg = scenario.env;
  const auto& b = cfg.bounds;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size_dist(2, cfg.n_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> delays;
  delays.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rsu::GapRequest req;
    req.platoon_id = i;
    req.size = size_dist(rng);
    req.leader_position = unit(rng) * scenario.sim.road.segment_length;
    req.leader_speed = unit(rng) * b.speed;
    for (int g = 0; g + 1 < req.size; ++g) req.current_gaps.push_back(b.gap_min + unit(rng) * (b.gap_max - b.gap_min));
    req.timestamp_us = i;
    const env::TrafficSnapshot traffic{unit(rng) * b.density_mainline, unit(rng) * b.density_ramp,
                                       unit(rng) * b.speed, unit(rng) * b.speed};
    const auto reply = rsu::handle_request(req, agent, traffic, cfg);
    const auto* resp = std::get_if<rsu::GapResponse>(&reply);
    if (!resp) throw std::runtime_error("latency probe request was rejected: " + std::get<rsu::ErrorMessage>(reply).detail);
    delays.push_back(resp->compute_delay_us);
  }
  return delays;
}

env::ScenarioVariation training_variation(std::vector<int> sizes) {
  if (sizes.empty()) throw std::invalid_argument("training needs at least one platoon size");
  return [sizes = std::move(sizes)](const env::Scenario& base, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> scale(0.5, 1.5);
    std::uniform_real_distribution<double> length(100.0, 250.0);
    std::uniform_real_distribution<double> assertive(0.25, 1.4);
    std::uniform_int_distribution<std::size_t> pick(0, sizes.size() - 1);
    env::Scenario s = base;
    s.sim.flow.ramp_rate = base.sim.flow.ramp_rate * scale(rng);
    s.sim.road.accel_lane_length = length(rng);
    s.sim.lane_change.merging_assertiveness = assertive(rng);
    const int size = std::min(sizes[pick(rng)], base.env.n_max);
    for (auto& p : s.platoons) p.size = size;
    return s;
  };
}

TrainOutcome train_policy(const TrainConfig& config) {
  config.scenario.validate();
  rl::DdpgConfig ddpg = config.ddpg;
  ddpg.state_dim = config.scenario.env.state_dim();
  ddpg.action_dim = config.scenario.env.action_dim();
  ddpg.validate();

  env::MergeEnv environment(config.scenario,
                            config.randomize ? training_variation(config.sizes) : env::ScenarioVariation{});
  TrainOutcome out{rl::DdpgAgent(ddpg), {}};
  rl::TrainOptions options;
  options.episodes = config.episodes;
  options.steps_per_episode = config.scenario.env.horizon;
  options.seed = config.seed;
  options.checkpoint_path = config.checkpoint_path;
  options.checkpoint_every = config.checkpoint_every;
  options.on_episode = config.on_episode;
  out.log = rl::train(environment, out.agent, options);
  return out;
}

}  // namespace gapflow::bench
