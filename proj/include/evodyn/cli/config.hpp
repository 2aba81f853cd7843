#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "evodyn/dynamics.hpp"
#include "evodyn/stability.hpp"

namespace evodyn::cli {

// A schema violation; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct MatrixConfig {
  // Either rsp(a, b) or explicit rows.
  std::optional<double> rsp_a;
  std::optional<double> rsp_b;
  std::vector<std::vector<double>> rows;

  bool operator==(const MatrixConfig&) const = default;
};

struct IncentiveConfig {
  std::string kind = "replicator";
  std::optional<double> q;
  std::optional<double> eta;
  std::optional<std::string> tie_rule;
  bool offspring_share = false;

  bool operator==(const IncentiveConfig&) const = default;
};

struct GeometryConfig {
  // shahshahani | euclidean | power_escort | scaled | constant
  std::string kind = "euclidean";
  std::optional<double> q;
  std::optional<double> beta;
  std::vector<std::vector<double>> rows;

  bool operator==(const GeometryConfig&) const = default;
};

struct TimeScaleConfig {
  // uniform | harmonic | geometric | explicit | continuous
  std::string kind = "uniform";
  std::optional<double> h;
  std::optional<double> r;
  std::optional<double> dt;
  std::optional<std::string> integrator;
  std::vector<double> steps;

  bool operator==(const TimeScaleConfig&) const = default;
};

struct PopulationConfig {
  int n = 3;
  MatrixConfig matrix;
  IncentiveConfig incentive;
  GeometryConfig geometry;
  TimeScaleConfig timescale;
  std::optional<double> mutation_epsilon;
  std::vector<double> x0;

  bool operator==(const PopulationConfig&) const = default;
};

struct DivergenceConfig {
  // kl | q | escort | metric
  std::string kind = "kl";
  std::optional<double> q;

  bool operator==(const DivergenceConfig&) const = default;
};

struct ScanConfig {
  std::string predicate = "iss";
  int resolution = 30;
  int population = 0;

  bool operator==(const ScanConfig&) const = default;
};

struct ScenarioConfig {
  std::string name;
  std::vector<PopulationConfig> populations;
  long steps = 0;
  std::vector<DivergenceConfig> divergences;
  // Empty: the barycenter for every population. One entry: shared by all.
  std::vector<std::vector<double>> target;
  std::string boundary_policy = "record_and_continue";
  std::string output;
  std::string coupling = "independent";
  double convergence_epsilon = 0.02;
  std::optional<ScanConfig> scan;

  bool operator==(const ScenarioConfig&) const = default;
};

struct ConfigDocument {
  std::vector<ScenarioConfig> scenarios;

  bool operator==(const ConfigDocument&) const = default;
};

// Accepts a single scenario object or {"scenarios": [...]}, then validates.
ConfigDocument parse_config(const nlohmann::json& j);
ConfigDocument load_config(const std::string& path);
nlohmann::json to_json(const ConfigDocument& doc);
nlohmann::json to_json(const ScenarioConfig& scenario);

// Cross-field checks; throws ConfigError.
void validate(const ScenarioConfig& scenario, const std::string& path);

// The engine objects a scenario describes.
struct BuiltScenario {
  MultiPopSpec spec;
  std::vector<SimplexPoint> x0;
  std::vector<SimplexPoint> targets;
  // divergences[alpha][j]
  std::vector<std::vector<DivergenceSpec>> divergences;
};

BuiltScenario build(const ScenarioConfig& scenario, const std::string& path = "");

Predicate parse_predicate(const std::string& name);

}  // namespace evodyn::cli
