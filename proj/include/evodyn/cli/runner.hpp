#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evodyn/cli/config.hpp"

namespace evodyn::cli {

struct RunOptions {
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  bool write_files = true;
  // 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct PopulationResult {
  Trajectory trajectory;
  Vector target;
  // One per configured divergence, in order.
  std::vector<std::string> divergence_names;
  std::vector<LyapunovTrace> traces;
  Convergence convergence;
};

struct ScenarioResult {
  std::string name;
  std::vector<PopulationResult> populations;
  // name -> summed trace over populations, for multi-population scenarios.
  std::vector<std::pair<std::string, LyapunovTrace>> combined;
  // Every population converged.
  bool converged = false;
  std::vector<std::string> runtime_errors;
  std::optional<std::vector<ScanPoint>> scan;
  std::vector<std::string> files;
};

ScenarioResult run_scenario(const ScenarioConfig& scenario, const RunOptions& options);

// Scenarios run in parallel; results keep the document order.
std::vector<ScenarioResult> run_document(const ConfigDocument& doc, const RunOptions& options);

std::vector<ScanPoint> scan_scenario(const ScenarioConfig& scenario, Predicate predicate,
                                     int resolution, int population = 0);

// Header x1..xn,value.
std::string scan_csv(const std::vector<ScanPoint>& points);
// Header pop,step,t,x_0..x_{n-1}.
std::string trajectory_csv(const Trajectory& traj, std::size_t pop);
// Header pop,step,t,divergence_name,value. Summed traces use pop "all".
std::string divergence_csv(const ScenarioResult& result);

// Writes `contents` to output_dir/name and returns the path.
std::string write_file(const std::string& output_dir, const std::string& name,
                       const std::string& contents);

// Line-oriented key=value verdicts for one scenario.
std::vector<std::string> check_report(const ScenarioConfig& scenario,
                                      const ScenarioResult& result,
                                      const RunOptions& options);

}  // namespace evodyn::cli
