#include "gapflow/bench/csv.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <system_error>

#include "gapflow/env/scenario.hpp"

namespace gapflow::bench {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_runs_csv(std::ostream& out, const SweepResult& result) {
  out << "variable,value,mode,platoon_size,repetition,seed,mean_speed_mps,throughput_vph,"
         "trip_speed_mps,requests\n";
  for (const auto& r : result.runs) {
    out << result.variable << ',' << format_number(r.cell.value) << ',' << to_string(r.cell.mode)
        << ',' << r.cell.platoon_size << ',' << r.repetition << ',' << r.seed << ','
        << format_number(r.mean_speed) << ',' << format_number(r.throughput) << ','
        << format_number(r.trip_speed) << ',' << r.requests << '\n';
  }
}

void write_summary_csv(std::ostream& out, const SweepResult& result) {
  out << "variable,value,mode,platoon_size,repetitions,mean_speed_mps,std_speed_mps,"
         "mean_throughput_vph,std_throughput_vph,pct_change_vs_base\n";
  for (const auto& c : result.cells) {
    out << result.variable << ',' << format_number(c.cell.value) << ',' << to_string(c.cell.mode)
        << ',' << c.cell.platoon_size << ',' << c.repetitions << ',' << format_number(c.mean_speed)
        << ',' << format_number(c.std_speed) << ',' << format_number(c.mean_throughput) << ','
        << format_number(c.std_throughput) << ',';
    if (c.pct_change) out << format_number(*c.pct_change);
    out << '\n';
  }
}

void write_series_csv(std::ostream& out, const std::vector<double>& series, double interval) {
  out << "time_s,mean_speed_mps\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_number(static_cast<double>(i + 1) * interval) << ',' << format_number(series[i])
        << '\n';
  }
}

nlohmann::ordered_json config_snapshot(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["scenario"] = nlohmann::ordered_json::parse(env::scenario_to_json(config.scenario));
  j["repetitions"] = config.repetitions;
  j["seed"] = config.seed;
  j["horizon_s"] = config.eval.horizon;
  j["sample_interval_s"] = config.eval.sample_interval;
  return j;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

void write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp + " for writing");
    f << content;
    if (!f) throw std::runtime_error("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot move " + tmp + " to " + path + ": " + ec.message());
}

}  // namespace gapflow::bench
