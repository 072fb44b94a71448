// gapflow: train gap policies and run the merge experiments.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gapflow/bench/csv.hpp"
#include "gapflow/bench/evaluation.hpp"
#include "gapflow/bench/experiments.hpp"
#include "gapflow/env/scenario.hpp"
#include "gapflow/rl/checkpoint.hpp"
#include "gapflow/rl/trainer.hpp"
#include "gapflow/rsu/advisor.hpp"
#include "gapflow/rsu/latency.hpp"
#include "gapflow/rsu/transport.hpp"

using namespace gapflow;

namespace {

std::atomic<bool> g_stop{false};

struct Globals {
  std::string config;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string mode;
  std::string checkpoint;
  int repetitions = 10;
  double horizon = 300.0;
  unsigned threads = 0;
};

env::Scenario load(const Globals& g) {
  return g.config.empty() ? env::default_scenario() : env::load_scenario(g.config);
}

bench::ExperimentConfig experiment(const Globals& g) {
  bench::ExperimentConfig cfg;
  cfg.scenario = load(g);
  cfg.repetitions = g.repetitions;
  cfg.seed = g.seed;
  cfg.eval.horizon = g.horizon;
  cfg.threads = g.threads;
  return cfg;
}

std::shared_ptr<const rl::DdpgAgent> load_agent(const std::string& path) {
  return std::make_shared<const rl::DdpgAgent>(rl::load_checkpoint(path));
}

std::string to_text(auto writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

void write_outputs(const std::string& dir, const bench::ExperimentConfig& cfg,
                   const bench::SweepResult& result, nlohmann::ordered_json extra) {
  bench::ensure_directory(dir);
  auto snapshot = bench::config_snapshot(cfg);
  for (auto& [k, v] : extra.items()) snapshot[k] = v;
  bench::write_file(dir + "/config.json", snapshot.dump(2) + "\n");
  bench::write_file(dir + "/runs.csv", to_text([&](std::ostream& os) { bench::write_runs_csv(os, result); }));
  bench::write_file(dir + "/summary.csv", to_text([&](std::ostream& os) { bench::write_summary_csv(os, result); }));
}

void print_summary(const bench::SweepResult& result) {
  std::printf("%-14s %-5s %5s %10s %8s %10s\n", result.variable.c_str(), "mode", "size", "speed", "std", "vs base");
  for (const auto& c : result.cells) {
    std::printf("%-14g %-5s %5d %10.3f %8.3f", c.cell.value, std::string(bench::to_string(c.cell.mode)).c_str(),
                c.cell.platoon_size, c.mean_speed, c.std_speed);
    if (c.pct_change) std::printf(" %+9.2f%%", *c.pct_change);
    std::printf("\n");
  }
}

std::vector<bench::Mode> modes_for(const Globals& g) {
  if (!g.mode.empty()) return {bench::parse_mode(g.mode)};
  if (g.checkpoint.empty()) return {bench::Mode::base};
  return {bench::Mode::base, bench::Mode::rlpg};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intra-platoon gap advisory for highway on-ramp merging"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Scenario JSON (default: built-in scenario)");
  app.add_option("--seed", g.seed, "Base seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--mode", g.mode, "base or rlpg")->check(CLI::IsMember({"base", "rlpg"}));
  app.add_option("--checkpoint", g.checkpoint, "Policy checkpoint");
  app.add_option("--repetitions", g.repetitions, "Repetitions per cell")->check(CLI::PositiveNumber);
  app.add_option("--horizon", g.horizon, "Simulated seconds per evaluation")->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "Worker threads (0: all cores)");

  auto* train = app.add_subcommand("train", "Train a gap policy with DDPG");
  int episodes = 300;
  int checkpoint_every = 0;
  bool fixed = false;
  std::vector<int> train_sizes{10, 20, 30};
  train->add_option("--episodes", episodes, "Training episodes")->check(CLI::NonNegativeNumber);
  train->add_option("--checkpoint-every", checkpoint_every, "Episodes between checkpoints");
  train->add_option("--sizes", train_sizes, "Platoon sizes drawn per episode")->delimiter(',');
  train->add_flag("--fixed", fixed, "Train on the scenario as given, without per-episode variation");

  auto* motivation = app.add_subcommand("motivation", "Base-mode speed versus platoon size");
  std::vector<int> motivation_sizes{2, 5, 10, 15, 20, 25, 30};
  motivation->add_option("--sizes", motivation_sizes, "Platoon sizes (below 2: no platoon)")->delimiter(',');

  auto* sweep = app.add_subcommand("sweep", "Base versus rlpg over one scenario variable");
  std::string kind;
  std::vector<double> values;
  std::vector<int> sweep_sizes{20, 30};
  sweep->add_option("--kind", kind, "density, merge-length or assertiveness")
      ->required()
      ->check(CLI::IsMember({"density", "merge-length", "assertiveness"}));
  sweep->add_option("--values", values, "Sweep values (default per kind)")->delimiter(',');
  sweep->add_option("--sizes", sweep_sizes, "Platoon sizes")->delimiter(',');

  auto* spacetime = app.add_subcommand("spacetime", "Speed grid over the 200 m merge region");

  auto* latency = app.add_subcommand("latency", "Compute-delay distribution of gap requests");
  int samples = 1000;
  latency->add_option("-n,--samples", samples, "Requests to time")->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Serve gap advisories over TCP");
  std::string listen = "127.0.0.1:7878";
  int n_max = 0;
  serve->add_option("--listen", listen, "host:port");
  serve->add_option("--n-max", n_max, "Largest platoon served (default: scenario n_max)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      bench::TrainConfig tc;
      tc.scenario = load(g);
      tc.episodes = episodes;
      tc.seed = g.seed;
      tc.ddpg.seed = g.seed;
      tc.randomize = !fixed;
      tc.sizes = train_sizes;
      tc.checkpoint_every = checkpoint_every;
      bench::ensure_directory(g.out);
      tc.checkpoint_path = g.checkpoint.empty() ? g.out + "/policy.ckpt" : g.checkpoint;
      tc.on_episode = [&](int e, double r) {
        if ((e + 1) % 25 == 0) std::fprintf(stderr, "episode %d reward %.0f\n", e + 1, r);
      };
      const auto outcome = bench::train_policy(tc);
      if (episodes == 0) rl::save_checkpoint(outcome.agent, tc.checkpoint_path);
      bench::write_file(g.out + "/rewards.csv",
                        to_text([&](std::ostream& os) { rl::write_reward_csv(os, outcome.log); }));
      nlohmann::ordered_json cfg;
      cfg["scenario"] = nlohmann::ordered_json::parse(env::scenario_to_json(tc.scenario));
      cfg["episodes"] = episodes;
      cfg["seed"] = g.seed;
      cfg["randomize"] = tc.randomize;
      cfg["sizes"] = tc.sizes;
      cfg["checkpoint"] = tc.checkpoint_path;
      bench::write_file(g.out + "/config.json", cfg.dump(2) + "\n");
      std::printf("trained %d episodes (%zu updates), checkpoint %s\n", episodes, outcome.log.updates,
                  tc.checkpoint_path.c_str());
    } else if (*motivation) {
      if (!g.mode.empty() && g.mode != "base") throw std::invalid_argument("motivation runs in base mode only");
      const auto cfg = experiment(g);
      const auto result = bench::run_motivation(cfg, motivation_sizes);
      write_outputs(g.out, cfg, result, {{"experiment", "motivation"}, {"sizes", motivation_sizes}});
      print_summary(result);
    } else if (*sweep) {
      const auto cfg = experiment(g);
      const auto k = bench::parse_sweep_kind(kind);
      if (values.empty()) values = bench::default_sweep_values(k);
      const auto modes = modes_for(g);
      std::shared_ptr<const rl::DdpgAgent> agent;
      for (const auto m : modes) {
        if (m == bench::Mode::rlpg) {
          if (g.checkpoint.empty()) throw std::invalid_argument("rlpg mode requires --checkpoint");
          agent = load_agent(g.checkpoint);
        }
      }
      const auto result = bench::run_sweep(cfg, k, values, sweep_sizes, modes, agent);
      nlohmann::ordered_json extra{{"experiment", "sweep"}, {"kind", kind}, {"values", values},
                                   {"sizes", sweep_sizes}, {"checkpoint", g.checkpoint}};
      write_outputs(g.out, cfg, result, extra);
      print_summary(result);
    } else if (*spacetime) {
      const auto cfg = experiment(g);
      const auto modes = modes_for(g);
      std::shared_ptr<const rl::DdpgAgent> agent;
      if (!g.checkpoint.empty()) agent = load_agent(g.checkpoint);
      bench::ensure_directory(g.out);
      for (const auto m : modes) {
        if (m == bench::Mode::rlpg && !agent) throw std::invalid_argument("rlpg mode requires --checkpoint");
        const auto r = bench::run_spacetime(cfg.scenario, m, g.seed, agent, cfg.eval);
        const std::string name = std::string(bench::to_string(m));
        bench::write_file(g.out + "/grid_" + name + ".csv",
                          to_text([&](std::ostream& os) { sim::write_grid_csv(os, r.grid); }));
        std::printf("%s: mean speed %.3f, %zu cells below %.2f m/s, largest band %zu, upstream band %s\n",
                    name.c_str(), r.mean_speed, r.breakdown.below_cells, cfg.scenario.env.reward.v_congestion,
                    r.breakdown.largest_band, r.breakdown.upstream_band ? "yes" : "no");
      }
      auto snapshot = bench::config_snapshot(cfg);
      snapshot["experiment"] = "spacetime";
      bench::write_file(g.out + "/config.json", snapshot.dump(2) + "\n");
    } else if (*latency) {
      if (g.checkpoint.empty()) throw std::invalid_argument("latency needs --checkpoint");
      const auto scenario = load(g);
      const auto agent = rl::load_checkpoint(g.checkpoint);
      const auto cdf = rsu::latency_cdf(bench::measure_latency(agent, scenario, samples, g.seed));
      bench::ensure_directory(g.out);
      bench::write_file(g.out + "/latency_cdf.csv", to_text([&](std::ostream& os) { rsu::write_cdf_csv(os, cdf); }));
      std::printf("requests %d: mean %.2f us, median %.2f us, p90 %.2f us, max %.2f us\n", samples, cdf.mean,
                  cdf.median(), cdf.percentile(0.9), cdf.sorted.back());
    } else if (*serve) {
      if (g.checkpoint.empty()) throw std::invalid_argument("serve needs --checkpoint");
      auto scenario = load(g);
      if (n_max > 0) scenario.env.n_max = n_max;
      auto agent = load_agent(g.checkpoint);
      const auto snapshot = rsu::free_flow_snapshot(scenario);
      rsu::TcpServer server(rsu::make_handler(agent, scenario.env, [snapshot] { return snapshot; }),
                            rsu::parse_endpoint(listen));
      std::signal(SIGINT, [](int) { g_stop = true; });
      std::signal(SIGTERM, [](int) { g_stop = true; });
      std::printf("serving on port %u\n", static_cast<unsigned>(server.port()));
      std::fflush(stdout);
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
      std::printf("served %llu requests\n", static_cast<unsigned long long>(server.requests_served()));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gapflow: %s\n", e.what());
    return 1;
  }
  return 0;
}
