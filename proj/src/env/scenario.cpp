#include "gapflow/env/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gapflow::env {

using nlohmann::ordered_json;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

/// Reads fields out of one JSON object, remembering which keys were consumed
/// so that leftovers can be reported as unknown.
class Section {
 public:
  Section(const ordered_json* node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_->is_object()) throw ScenarioError("key '" + path_ + "': expected an object");
  }

  bool has(const std::string& key) const { return node_ && node_->contains(key); }
  void mark(const std::string& key) { seen_.insert(key); }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!node_) return;
    seen_.insert(key);
    const auto it = node_->find(key);
    if (it == node_->end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ScenarioError("key '" + full(key) + "': wrong type");
    }
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return Section(nullptr, full(key));
    return Section(&node_->at(key), full(key));
  }

  const ordered_json* node() const { return node_; }
  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    if (!node_) return;
    for (const auto& [key, value] : node_->items()) {
      if (!seen_.count(key)) throw ScenarioError("unknown key '" + full(key) + "'");
    }
  }

 private:
  const ordered_json* node_;
  std::string path_;
  std::set<std::string> seen_;
};

std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

platoon::PlatoonSpec read_platoon(Section s) {
  platoon::PlatoonSpec p;
  s.read("lane", p.lane);
  s.read("size", p.size);
  s.read("default_gap_m", p.default_gap);
  s.read("scheduled_arrival_s", p.scheduled_arrival);
  s.read("arrival_jitter_s", p.arrival_jitter);
  s.read("arrival_offset_m", p.arrival_offset);
  s.read("controlled", p.controlled);
  s.finish();
  return p;
}

}  // namespace

void RewardConfig::validate() const {
  require(l_segment > 0, "env.reward.l_segment_m must be positive");
  require(v_congestion > 0, "env.reward.v_congestion_mps must be positive");
  require(delay_window > 0, "env.reward.delay_window_s must be positive");
}

void ObservationBounds::validate() const {
  require(density_mainline > 0, "env.bounds.density_mainline must be positive");
  require(density_ramp > 0, "env.bounds.density_ramp must be positive");
  require(speed > 0, "env.bounds.speed_mps must be positive");
  require(gap_max > gap_min, "env.bounds: gap_max must exceed gap_min");
}

void EnvConfig::validate() const {
  require(decision_interval > 0, "env.decision_interval_s must be positive");
  require(horizon > 0, "env.horizon_steps must be positive");
  require(n_max >= 2, "env.n_max must be at least 2");
  require(warmup_limit >= 0, "env.warmup_limit_s must be non-negative");
  reward.validate();
  bounds.validate();
}

void Scenario::validate() const {
  sim.validate();
  env.validate();
  const double ticks = env.decision_interval / sim.dt;
  require(std::abs(ticks - std::round(ticks)) < 1e-9 && ticks >= 1,
          "env.decision_interval_s must be a whole number of sim.dt ticks");
  for (const auto& p : platoons) {
    require(p.size >= 2, "platoons[].size must be at least 2");
    require(p.size <= env.n_max || !p.controlled, "platoons[].size exceeds env.n_max");
    require(sim.road.is_mainline(p.lane), "platoons[].lane must be a mainline lane");
    require(p.default_gap >= platoon::kGapMin && p.default_gap <= platoon::kGapMax,
            "platoons[].default_gap_m outside [2, 30]");
  }
}

Scenario default_scenario() {
  Scenario s;
  platoon::PlatoonSpec p;
  p.lane = s.sim.road.adjacent_lane();
  p.size = 20;
  p.controlled = true;
  s.platoons.push_back(p);
  s.env.bounds.speed = s.sim.road.speed_limit;
  s.env.reward.l_segment = s.sim.road.segment_length;
  s.env.reward.v_congestion = s.sim.road.speed_limit / 3.0;
  return s;
}

Scenario parse_scenario(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("scenario parse error at line " + std::to_string(line_of(json_text, e.byte)) +
                        ": " + e.what());
  }
  Scenario s;
  s.platoons.clear();
  Section root(&doc, "");

  auto& road = s.sim.road;
  {
    Section r = root.child("road");
    r.read("segment_length_m", road.segment_length);
    r.read("mainline_lanes", road.mainline_lanes);
    r.read("merge_lane_length_m", road.merge_lane_length);
    r.read("accel_lane_length_m", road.accel_lane_length);
    r.read("merge_zone_start_m", road.merge_zone_start);
    r.read("speed_limit_mps", road.speed_limit);
    r.finish();
  }
  auto& cf = s.sim.car_following;
  cf.desired_speed = road.speed_limit;
  {
    Section c = root.child("car_following");
    c.read("desired_speed_mps", cf.desired_speed);
    c.read("time_headway_s", cf.time_headway);
    c.read("min_gap_m", cf.min_gap);
    c.read("max_accel", cf.max_accel);
    c.read("comfort_decel", cf.comfort_decel);
    c.read("exponent", cf.exponent);
    c.read("accel_min", cf.accel_min);
    c.read("accel_max", cf.accel_max);
    c.read("v_max_mps", cf.v_max);
    c.finish();
  }
  {
    auto& lc = s.sim.lane_change;
    Section c = root.child("lane_change");
    c.read("politeness", lc.politeness);
    c.read("threshold", lc.threshold);
    c.read("merging_assertiveness", lc.merging_assertiveness);
    c.read("mainline_assertiveness", lc.mainline_assertiveness);
    c.read("cooldown_s", lc.cooldown);
    c.finish();
  }
  {
    auto& f = s.sim.flow;
    Section c = root.child("flow");
    c.read("mainline_rate_vph", f.mainline_rate);
    c.read("ramp_rate_vph", f.ramp_rate);
    c.read("injection_speed_mps", f.injection_speed);
    c.read("ramp_injection_speed_mps", f.ramp_injection_speed);
    c.read("seed", f.seed);
    c.finish();
  }
  {
    auto& g = s.sim.gap_controller;
    Section c = root.child("gap_controller");
    c.read("k_gap", g.k_gap);
    c.read("k_speed", g.k_speed);
    c.read("k_accel", g.k_accel);
    c.read("accel_min", g.accel_min);
    c.read("accel_max", g.accel_max);
    c.read("safety_min_gap_m", g.safety_min_gap);
    c.read("safety_time_headway_s", g.safety_time_headway);
    c.finish();
  }
  {
    Section c = root.child("sim");
    c.read("dt_s", s.sim.dt);
    c.read("vehicle_length_min_m", s.sim.vehicle_length_min);
    c.read("vehicle_length_max_m", s.sim.vehicle_length_max);
    c.finish();
  }

  if (root.has("platoons")) {
    const ordered_json& list = root.node()->at("platoons");
    if (!list.is_array()) throw ScenarioError("key 'platoons': expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      s.platoons.push_back(read_platoon(Section(&list[i], "platoons[" + std::to_string(i) + "]")));
    }
  }
  root.mark("platoons");

  auto& env = s.env;
  env.bounds.speed = road.speed_limit;
  env.reward.l_segment = road.segment_length;
  env.reward.v_congestion = road.speed_limit / 3.0;
  {
    Section e = root.child("env");
    e.read("decision_interval_s", env.decision_interval);
    e.read("horizon_steps", env.horizon);
    e.read("n_max", env.n_max);
    e.read("warmup_limit_s", env.warmup_limit);
    {
      Section r = e.child("reward");
      r.read("l_segment_m", env.reward.l_segment);
      r.read("v_congestion_mps", env.reward.v_congestion);
      r.read("delay_window_s", env.reward.delay_window);
      r.finish();
    }
    {
      Section b = e.child("bounds");
      b.read("density_mainline", env.bounds.density_mainline);
      b.read("density_ramp", env.bounds.density_ramp);
      b.read("speed_mps", env.bounds.speed);
      b.read("gap_min_m", env.bounds.gap_min);
      b.read("gap_max_m", env.bounds.gap_max);
      b.finish();
    }
    e.finish();
  }
  root.finish();

  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("invalid scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(path + ": " + e.what());
  }
}

std::string scenario_to_json(const Scenario& s, int indent) {
  ordered_json j;
  const auto& road = s.sim.road;
  j["road"] = {{"segment_length_m", road.segment_length},
               {"mainline_lanes", road.mainline_lanes},
               {"merge_lane_length_m", road.merge_lane_length},
               {"accel_lane_length_m", road.accel_lane_length},
               {"merge_zone_start_m", road.merge_zone_start},
               {"speed_limit_mps", road.speed_limit}};
  const auto& cf = s.sim.car_following;
  j["car_following"] = {{"desired_speed_mps", cf.desired_speed}, {"time_headway_s", cf.time_headway},
                        {"min_gap_m", cf.min_gap},           {"max_accel", cf.max_accel},
                        {"comfort_decel", cf.comfort_decel}, {"exponent", cf.exponent},
                        {"accel_min", cf.accel_min},         {"accel_max", cf.accel_max},
                        {"v_max_mps", cf.v_max}};
  const auto& lc = s.sim.lane_change;
  j["lane_change"] = {{"politeness", lc.politeness},
                      {"threshold", lc.threshold},
                      {"merging_assertiveness", lc.merging_assertiveness},
                      {"mainline_assertiveness", lc.mainline_assertiveness},
                      {"cooldown_s", lc.cooldown}};
  const auto& f = s.sim.flow;
  j["flow"] = {{"mainline_rate_vph", f.mainline_rate},
               {"ramp_rate_vph", f.ramp_rate},
               {"injection_speed_mps", f.injection_speed},
               {"ramp_injection_speed_mps", f.ramp_injection_speed},
               {"seed", f.seed}};
  const auto& g = s.sim.gap_controller;
  j["gap_controller"] = {{"k_gap", g.k_gap},
                         {"k_speed", g.k_speed},
                         {"k_accel", g.k_accel},
                         {"accel_min", g.accel_min},
                         {"accel_max", g.accel_max},
                         {"safety_min_gap_m", g.safety_min_gap},
                         {"safety_time_headway_s", g.safety_time_headway}};
  j["sim"] = {{"dt_s", s.sim.dt},
              {"vehicle_length_min_m", s.sim.vehicle_length_min},
              {"vehicle_length_max_m", s.sim.vehicle_length_max}};
  j["platoons"] = ordered_json::array();
  for (const auto& p : s.platoons) {
    j["platoons"].push_back({{"lane", p.lane},
                             {"size", p.size},
                             {"default_gap_m", p.default_gap},
                             {"scheduled_arrival_s", p.scheduled_arrival},
                             {"arrival_jitter_s", p.arrival_jitter},
                             {"arrival_offset_m", p.arrival_offset},
                             {"controlled", p.controlled}});
  }
  const auto& e = s.env;
  j["env"] = {{"decision_interval_s", e.decision_interval},
              {"horizon_steps", e.horizon},
              {"n_max", e.n_max},
              {"warmup_limit_s", e.warmup_limit},
              {"reward",
               {{"l_segment_m", e.reward.l_segment},
                {"v_congestion_mps", e.reward.v_congestion},
                {"delay_window_s", e.reward.delay_window}}},
              {"bounds",
               {{"density_mainline", e.bounds.density_mainline},
                {"density_ramp", e.bounds.density_ramp},
                {"speed_mps", e.bounds.speed},
                {"gap_min_m", e.bounds.gap_min},
                {"gap_max_m", e.bounds.gap_max}}}};
  return j.dump(indent);
}

}  // namespace gapflow::env
