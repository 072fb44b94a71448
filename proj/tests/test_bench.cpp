#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "gapflow/bench/csv.hpp"
#include "gapflow/bench/evaluation.hpp"
#include "gapflow/bench/experiments.hpp"

using namespace gapflow;
using namespace gapflow::bench;

namespace {

env::Scenario small_scenario() {
  env::Scenario s = env::default_scenario();
  s.sim.flow.mainline_rate = 1500;
  s.sim.flow.ramp_rate = 1200;
  s.platoons.resize(1);
  s.platoons[0].size = 10;
  s.platoons[0].scheduled_arrival = 20.0;
  s.platoons[0].controlled = true;
  return s;
}

std::shared_ptr<rl::DdpgAgent> agent_for(const env::Scenario& s) {
  rl::DdpgConfig c;
  c.state_dim = s.env.state_dim();
  c.action_dim = s.env.action_dim();
  c.seed = 3;
  return std::make_shared<rl::DdpgAgent>(c);
}

ExperimentConfig quick_config() {
  ExperimentConfig c;
  c.scenario = small_scenario();
  c.repetitions = 2;
  c.eval.horizon = 60.0;
  c.threads = 1;
  return c;
}

sim::SpaceTimeGrid synthetic_grid(std::size_t nx, std::size_t nt, double fill) {
  sim::SpaceTimeGrid g;
  g.spec.nx = nx;
  g.spec.nt = nt;
  g.cells.assign(nx, std::vector<sim::GridCell>(nt, sim::GridCell{fill, 1}));
  return g;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_CASE("base mode never consults the policy") {
  const auto s = small_scenario();
  const auto agent = agent_for(s);
  EvalOptions opt;
  opt.horizon = 60.0;
  const auto m = evaluate(s, Mode::base, 5, agent, opt);
  CHECK(agent->inference_count() == 0);
  CHECK(m.requests == 0);
  CHECK(m.speed_series.size() == 60);
  CHECK(m.mean_speed > 0.0);
  CHECK(evaluate(s, Mode::base, 5, nullptr, opt).mean_speed == m.mean_speed);
}

TEST_CASE("rlpg mode requests gaps once per decision") {
  const auto s = small_scenario();
  const auto agent = agent_for(s);
  EvalOptions opt;
  opt.horizon = 60.0;
  const auto m = evaluate(s, Mode::rlpg, 5, agent, opt);
  CHECK(m.requests > 0);
  CHECK(agent->inference_count() == m.requests);
  CHECK(m.guard_interventions == 0);
  const auto again = evaluate(s, Mode::rlpg, 5, agent, opt);
  CHECK(again.mean_speed == m.mean_speed);
  CHECK_THROWS_AS(evaluate(s, Mode::rlpg, 5, nullptr, opt), std::invalid_argument);
  rl::DdpgConfig wrong;
  wrong.state_dim = 10;
  wrong.action_dim = 4;
  CHECK_THROWS_AS(evaluate(s, Mode::rlpg, 5, std::make_shared<rl::DdpgAgent>(wrong), opt),
                  std::invalid_argument);
}

TEST_CASE("sweep parameters map onto the scenario") {
  const auto s = small_scenario();
  CHECK(apply_sweep_value(s, SweepKind::density, 2.0).sim.flow.ramp_rate == doctest::Approx(1800.0));
  CHECK(apply_sweep_value(s, SweepKind::merge_length, 100.0).sim.road.accel_lane_length == 100.0);
  CHECK(apply_sweep_value(s, SweepKind::assertiveness, 1.4).sim.lane_change.merging_assertiveness == 1.4);
  CHECK(parse_sweep_kind("merge-length") == SweepKind::merge_length);
  CHECK(to_string(SweepKind::merge_length) == "merge-length");
  CHECK_THROWS_AS(parse_sweep_kind("speed"), std::invalid_argument);
  CHECK(parse_mode("rlpg") == Mode::rlpg);
  CHECK_THROWS_AS(parse_mode("fast"), std::invalid_argument);
  CHECK(with_platoon_size(s, 30).platoons[0].size == 30);
  CHECK(with_platoon_size(s, 0).platoons.empty());
  CHECK(repetition_seed(1, 0) != repetition_seed(1, 1));
}

TEST_CASE("summaries use the sample standard deviation and percent change") {
  std::vector<RunRecord> runs;
  auto add = [&](Mode mode, double speed, double flow) {
    RunRecord r;
    r.cell = CellKey{1.0, mode, 20};
    r.mean_speed = speed;
    r.throughput = flow;
    runs.push_back(r);
  };
  add(Mode::base, 10, 1000);
  add(Mode::base, 14, 1400);
  add(Mode::rlpg, 15, 1500);
  add(Mode::rlpg, 15, 1500);
  const auto cells = summarize(runs);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].mean_speed == 12.0);
  CHECK(cells[0].std_speed == doctest::Approx(std::sqrt(8.0)));
  CHECK_FALSE(cells[0].pct_change.has_value());
  CHECK(cells[1].std_speed == 0.0);
  CHECK(*cells[1].pct_change == doctest::Approx(25.0));
}

TEST_CASE("sweep output is deterministic and self-consistent") {
  auto config = quick_config();
  const auto s0 = small_scenario();
  const auto agent = agent_for(s0);
  const auto run = [&](unsigned threads) {
    config.threads = threads;
    return run_sweep(config, SweepKind::density, {2.0, 4.0}, {10}, {Mode::base, Mode::rlpg}, agent);
  };
  const SweepResult a = run(1), b = run(3);
  std::ostringstream ra, rb, sa, sb;
  write_runs_csv(ra, a);
  write_runs_csv(rb, b);
  write_summary_csv(sa, a);
  write_summary_csv(sb, b);
  CHECK(ra.str() == rb.str());
  CHECK(sa.str() == sb.str());
  CHECK(a.runs.size() == 8);

  // Recompute the summary columns from the raw CSV.
  std::istringstream raw(ra.str());
  std::string line;
  std::getline(raw, line);
  CHECK(line == "variable,value,mode,platoon_size,repetition,seed,mean_speed_mps,throughput_vph,trip_speed_mps,requests");
  std::map<std::pair<std::string, std::string>, std::vector<double>> speeds;
  while (std::getline(raw, line)) {
    const auto f = split(line);
    REQUIRE(f.size() == 10);
    speeds[{f[1], f[2]}].push_back(std::stod(f[6]));
  }
  std::istringstream summary(sa.str());
  std::getline(summary, line);
  int rows = 0;
  while (std::getline(summary, line)) {
    const auto f = split(line);
    REQUIRE(f.size() == 10);
    const auto& v = speeds.at({f[1], f[2]});
    const double mean = (v[0] + v[1]) / 2.0;
    CHECK(std::stod(f[5]) == doctest::Approx(mean).epsilon(1e-12));
    CHECK(std::stod(f[6]) == doctest::Approx(std::abs(v[0] - v[1]) / std::sqrt(2.0)).epsilon(1e-9));
    if (f[2] == "rlpg") {
      const auto& base = speeds.at({f[1], "base"});
      const double base_mean = (base[0] + base[1]) / 2.0;
      CHECK(std::stod(f[9]) == doctest::Approx(100.0 * (mean - base_mean) / base_mean).epsilon(1e-9));
    } else {
      CHECK(f[9].empty());
    }
    ++rows;
  }
  CHECK(rows == 4);
  CHECK(a.cell(2.0, Mode::rlpg, 10).repetitions == 2);
  CHECK_THROWS_AS(a.cell(3.0, Mode::rlpg, 10), std::out_of_range);
}

TEST_CASE("rlpg sweeps need a policy") {
  CHECK_THROWS_WITH_AS(run_sweep(quick_config(), SweepKind::density, {2.0}, {10}, {Mode::rlpg}, nullptr),
                       "rlpg mode requires a checkpoint", std::invalid_argument);
  auto bad = quick_config();
  bad.repetitions = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("motivation runs base mode per size") {
  const auto r = run_motivation(quick_config(), {0, 10});
  CHECK(r.variable == "platoon_size");
  REQUIRE(r.cells.size() == 2);
  CHECK(r.cells[0].cell.mode == Mode::base);
  CHECK(r.cells[1].cell.platoon_size == 10);
}

TEST_CASE("breakdown analysis on synthetic grids") {
  SUBCASE("free flow has no low cells") {
    const auto rep = analyse_breakdown(synthetic_grid(20, 10, 25.0), 10.0);
    CHECK(rep.below_cells == 0);
    CHECK_FALSE(rep.upstream_band);
  }
  SUBCASE("a jam growing upstream is detected") {
    auto g = synthetic_grid(20, 10, 25.0);
    for (std::size_t t = 2; t < 8; ++t) {
      for (std::size_t i = 17 - 2 * (t - 2); i <= 18; ++i) g.cells[i][t].mean_speed = 3.0;
    }
    const auto rep = analyse_breakdown(g, 10.0);
    CHECK(rep.upstream_band);
    CHECK(rep.largest_band == rep.below_cells);
  }
  SUBCASE("a band drifting downstream is not") {
    auto g = synthetic_grid(20, 10, 25.0);
    for (std::size_t t = 0; t < 8; ++t) {
      g.cells[2 + t][t].mean_speed = 3.0;
      g.cells[3 + t][t].mean_speed = 3.0;
    }
    CHECK_FALSE(analyse_breakdown(g, 10.0).upstream_band);
  }
  SUBCASE("missing cells never count as slow") {
    auto g = synthetic_grid(4, 4, 25.0);
    for (auto& row : g.cells) {
      for (auto& c : row) c = sim::GridCell{};
    }
    CHECK(analyse_breakdown(g, 10.0).below_cells == 0);
  }
}

TEST_CASE("merge region grid geometry") {
  const auto s = small_scenario();
  const auto spec = merge_region_grid(s, 300.0);
  CHECK(spec.x_end == s.sim.road.merge_zone_end());
  CHECK(spec.x_start == spec.x_end - 200.0);
  CHECK(spec.nx == 20);
  CHECK(spec.nt == 60);
  CHECK_FALSE(spec.include_ramp);
}

TEST_CASE("training variation stays in range") {
  const auto vary = training_variation({10, 20, 30});
  const auto base = env::default_scenario();
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const auto s = vary(base, rng);
    CHECK(s.sim.flow.ramp_rate >= 0.5 * base.sim.flow.ramp_rate);
    CHECK(s.sim.flow.ramp_rate <= 1.5 * base.sim.flow.ramp_rate);
    CHECK(s.sim.road.accel_lane_length >= 100.0);
    CHECK(s.sim.road.accel_lane_length <= 250.0);
    CHECK(s.sim.lane_change.merging_assertiveness >= 0.25);
    CHECK(s.sim.lane_change.merging_assertiveness <= 1.4);
    const int size = s.platoons[0].size;
    CHECK((size == 10 || size == 20 || size == 30));
    CHECK_NOTHROW(s.validate());
  }
}

TEST_CASE("latency measurement") {
  const auto s = small_scenario();
  const auto agent = agent_for(s);
  const auto samples = measure_latency(*agent, s, 50, 2);
  CHECK(samples.size() == 50);
  for (double us : samples) CHECK(us >= 0.0);
  CHECK(agent->inference_count() == 50);
}

TEST_CASE("number formatting reads back exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(30.0) == "30");
}
