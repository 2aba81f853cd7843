#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "evodyn/cli/config.hpp"
#include "evodyn/cli/presets.hpp"
#include "evodyn/cli/runner.hpp"
#include "evodyn/errors.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kRuntime = 3;

using evodyn::cli::ConfigDocument;
using evodyn::cli::RunOptions;

int report_runs(const ConfigDocument& doc, const RunOptions& options, bool check) {
  const auto results = evodyn::cli::run_document(doc, options);
  int status = kOk;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (check) {
      for (const auto& line : evodyn::cli::check_report(doc.scenarios[i], r, options)) {
        std::cout << line << "\n";
      }
    } else {
      for (const auto& f : r.files) std::cout << f << "\n";
    }
    for (const auto& e : r.runtime_errors) {
      std::cerr << r.name << ": " << e << "\n";
      status = kRuntime;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolutionary dynamics on the simplex: simulate and check stability."};
  app.require_subcommand(1);

  RunOptions options;
  std::uint64_t seed = 0;
  app.add_option("--output-dir", options.output_dir, "Directory for CSV output")
      ->capture_default_str();
  app.add_option("--seed", seed, "Seed for sampling-based predicates")->capture_default_str();

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run every scenario of a config and write CSVs");
  run->add_option("config", config_path, "Config file")->required();

  std::string figure_id;
  bool emit = false;
  bool run_figure = false;
  auto* figure = app.add_subcommand("figure", "Emit or run a figure preset");
  figure->add_option("id", figure_id, "Preset id")->required();
  auto* emit_flag = figure->add_flag("--emit-config", emit, "Print the preset config (default)");
  figure->add_flag("--run", run_figure, "Run the preset")->excludes(emit_flag);

  std::string predicate = "iss";
  int resolution = 30;
  int population = 0;
  auto* scan = app.add_subcommand("scan", "Evaluate a stability predicate on a simplex grid");
  scan->add_option("config", config_path, "Config file")->required();
  scan->add_option("--predicate", predicate, "iss, eiss, giss or ess")->capture_default_str();
  scan->add_option("--resolution", resolution, "Grid resolution k >= 2")->capture_default_str();
  scan->add_option("--population", population, "Population index")->capture_default_str();

  auto* check = app.add_subcommand("check", "Print key=value verdicts for every scenario");
  check->add_option("config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }
  options.seed = seed;

  try {
    if (*run) return report_runs(evodyn::cli::load_config(config_path), options, false);
    if (*check) {
      options.write_files = false;
      return report_runs(evodyn::cli::load_config(config_path), options, true);
    }
    if (*figure) {
      const ConfigDocument doc = evodyn::cli::figure(figure_id);
      if (!run_figure) {
        std::cout << evodyn::cli::to_json(doc).dump(2) << "\n";
        return kOk;
      }
      return report_runs(doc, options, false);
    }
    if (*scan) {
      const ConfigDocument doc = evodyn::cli::load_config(config_path);
      const auto pred = evodyn::cli::parse_predicate(predicate);
      if (resolution < 2) throw evodyn::cli::ConfigError("resolution", "must be >= 2");
      for (const auto& s : doc.scenarios) {
        const auto points = evodyn::cli::scan_scenario(s, pred, resolution, population);
        std::cout << evodyn::cli::write_file(options.output_dir,
                                             s.output + ".scan." + predicate + ".csv",
                                             evodyn::cli::scan_csv(points))
                  << "\n";
      }
      return kOk;
    }
  } catch (const evodyn::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kValidation;
  } catch (const evodyn::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
