#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gapflow/bench/experiments.hpp"

namespace gapflow::bench {

/// Shortest text that reads back to the same double.
std::string format_number(double value);

/// variable,value,mode,platoon_size,repetition,seed,mean_speed_mps,throughput_vph,trip_speed_mps,requests
void write_runs_csv(std::ostream& out, const SweepResult& result);

/// variable,value,mode,platoon_size,repetitions,mean_speed_mps,std_speed_mps,
/// mean_throughput_vph,std_throughput_vph,pct_change_vs_base
/// pct_change_vs_base is empty for base cells.
void write_summary_csv(std::ostream& out, const SweepResult& result);

/// time_s,mean_speed_mps for one evaluated episode.
void write_series_csv(std::ostream& out, const std::vector<double>& series, double interval);

/// Snapshot of everything that determines an experiment's output.
nlohmann::ordered_json config_snapshot(const ExperimentConfig& config);

/// Creates `dir` (and parents) if needed. Throws std::runtime_error on failure.
void ensure_directory(const std::string& dir);

/// Writes via a temporary file and rename. Throws std::runtime_error on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace gapflow::bench
