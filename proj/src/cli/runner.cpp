#include "evodyn/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <fmt/format.h>

#include "evodyn/errors.hpp"

namespace evodyn::cli {

namespace {

std::string num(double v) { return fmt::format("{:.16e}", v); }

const char* flag(bool b) { return b ? "true" : "false"; }

double tail_extent(const Trajectory& traj, const Vector& target) {
  const auto& s = traj.samples;
  double extent = 0.0;
  for (std::size_t k = s.size() / 2; k < s.size(); ++k) {
    extent = std::max(extent, (s[k].x - target).norm());
  }
  return extent;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& scenario, const RunOptions& options) {
  BuiltScenario built = build(scenario);
  ScenarioResult result;
  result.name = scenario.name;

  std::vector<Trajectory> trajs = run_multipop(built.spec, built.x0, scenario.steps);
  result.converged = true;
  for (std::size_t a = 0; a < trajs.size(); ++a) {
    PopulationResult pop;
    pop.target = built.targets[a].coords();
    for (const auto& d : built.divergences[a]) {
      pop.divergence_names.push_back(d.name());
      pop.traces.push_back(lyapunov_trace(trajs[a], d, built.targets[a]));
    }
    pop.convergence =
        convergence_detect(trajs[a], built.targets[a], scenario.convergence_epsilon);
    result.converged = result.converged && pop.convergence.converged;
    if (trajs[a].error) {
      long step = trajs[a].samples.back().step + 1;
      result.runtime_errors.push_back(
          fmt::format("population {} stopped at step {}: {}", a, step, *trajs[a].error));
    }
    pop.trajectory = std::move(trajs[a]);
    result.populations.push_back(std::move(pop));
  }
  if (result.populations.size() > 1) {
    std::vector<Trajectory> all;
    for (const auto& p : result.populations) all.push_back(p.trajectory);
    for (std::size_t j = 0; j < scenario.divergences.size(); ++j) {
      std::vector<DivergenceSpec> divs;
      for (const auto& d : built.divergences) divs.push_back(d[j]);
      result.combined.emplace_back("L_" + divs.front().name(),
                                   combined_trace(all, divs, built.targets));
    }
  }
  if (scenario.scan) {
    result.scan = scan_scenario(scenario, parse_predicate(scenario.scan->predicate),
                                scenario.scan->resolution, scenario.scan->population);
  }

  if (options.write_files) {
    for (std::size_t a = 0; a < result.populations.size(); ++a) {
      result.files.push_back(write_file(options.output_dir,
                                        fmt::format("{}.pop{}.csv", scenario.output, a),
                                        trajectory_csv(result.populations[a].trajectory, a)));
    }
    result.files.push_back(write_file(options.output_dir, scenario.output + ".divergence.csv",
                                      divergence_csv(result)));
    if (result.scan) {
      result.files.push_back(write_file(
          options.output_dir,
          fmt::format("{}.scan.{}.csv", scenario.output, scenario.scan->predicate),
          scan_csv(*result.scan)));
    }
  }
  return result;
}

std::vector<ScenarioResult> run_document(const ConfigDocument& doc, const RunOptions& options) {
  const std::size_t count = doc.scenarios.size();
  std::vector<ScenarioResult> results(count);
  std::vector<std::exception_ptr> failures(count);
  unsigned workers = options.threads ? options.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = run_scenario(doc.scenarios[i], options);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return results;
}

std::vector<ScanPoint> scan_scenario(const ScenarioConfig& scenario, Predicate predicate,
                                     int resolution, int population) {
  BuiltScenario built = build(scenario);
  if (population < 0 || static_cast<std::size_t>(population) >= built.x0.size()) {
    throw ConfigError("population", "no such population");
  }
  const auto a = static_cast<std::size_t>(population);
  const MarginFunction margin =
      predicate_margin(predicate, built.spec.populations[a], built.targets[a]);
  return region_scan(margin, built.x0[a].size(), resolution);
}

std::string scan_csv(const std::vector<ScanPoint>& points) {
  std::string out;
  const Eigen::Index n = points.empty() ? 0 : points.front().x.size();
  for (Eigen::Index i = 0; i < n; ++i) out += fmt::format("x{},", i + 1);
  out += "value\n";
  for (const auto& p : points) {
    for (Eigen::Index i = 0; i < n; ++i) out += num(p.x[i]) + ",";
    out += num(p.value) + "\n";
  }
  return out;
}

std::string trajectory_csv(const Trajectory& traj, std::size_t pop) {
  std::string out = "pop,step,t";
  const Eigen::Index n = traj.samples.empty() ? 0 : traj.samples.front().x.size();
  for (Eigen::Index i = 0; i < n; ++i) out += fmt::format(",x_{}", i);
  out += "\n";
  for (const auto& s : traj.samples) {
    out += fmt::format("{},{},{}", pop, s.step, num(s.t));
    for (Eigen::Index i = 0; i < n; ++i) out += "," + num(s.x[i]);
    out += "\n";
  }
  return out;
}

std::string divergence_csv(const ScenarioResult& result) {
  std::string out = "pop,step,t,divergence_name,value\n";
  for (std::size_t a = 0; a < result.populations.size(); ++a) {
    const auto& p = result.populations[a];
    for (std::size_t j = 0; j < p.traces.size(); ++j) {
      const auto& tr = p.traces[j];
      for (std::size_t k = 0; k < tr.values.size(); ++k) {
        out += fmt::format("{},{},{},{},{}\n", a, p.trajectory.samples[k].step,
                           num(tr.times[k]), p.divergence_names[j], num(tr.values[k]));
      }
    }
  }
  if (!result.populations.empty()) {
    // Summed traces are indexed by the first population's steps.
    const auto& first = result.populations.front().trajectory.samples;
    for (const auto& [name, tr] : result.combined) {
      std::size_t cursor = 0;
      for (std::size_t k = 0; k < tr.values.size(); ++k) {
        while (cursor < first.size() && first[cursor].t < tr.times[k]) ++cursor;
        const long step = cursor < first.size() ? first[cursor].step : -1;
        out += fmt::format("all,{},{},{},{}\n", step, num(tr.times[k]), name,
                           num(tr.values[k]));
      }
    }
  }
  return out;
}

std::string write_file(const std::string& output_dir, const std::string& name,
                       const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path dir(output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + output_dir + ": " + ec.message());
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  return path.string();
}

std::vector<std::string> check_report(const ScenarioConfig& scenario,
                                      const ScenarioResult& result,
                                      const RunOptions& options) {
  std::vector<std::string> lines;
  const BuiltScenario built = build(scenario);
  const std::string& name = scenario.name;
  auto put = [&](const std::string& key, const std::string& value) {
    lines.push_back(key + "=" + value);
  };
  for (std::size_t a = 0; a < result.populations.size(); ++a) {
    const PopulationResult& p = result.populations[a];
    const std::string pre = fmt::format("{}.pop{}", name, a);
    const Trajectory& t = p.trajectory;
    put(pre + ".steps_run", std::to_string(t.samples.back().step));
    put(pre + ".truncated", flag(t.truncated));
    put(pre + ".events", std::to_string(t.events.size()));
    if (!t.events.empty()) {
      put(pre + ".first_event", fmt::format("{}@{}", to_string(t.events.front().kind),
                                            t.events.front().step));
    }
    put(pre + ".converged", flag(p.convergence.converged));
    if (p.convergence.converged) put(pre + ".converged_step", std::to_string(p.convergence.step));
    put(pre + ".distance_final", num((t.final_state() - p.target).norm()));
    put(pre + ".tail_extent", num(tail_extent(t, p.target)));
    for (std::size_t j = 0; j < p.traces.size(); ++j) {
      const std::string key = pre + "." + p.divergence_names[j];
      put(key, to_string(p.traces[j].verdict));
      put(key + ".local_maxima", std::to_string(p.traces[j].local_maxima()));
      put(key + ".invalid_samples", std::to_string(p.traces[j].invalid_samples.size()));
    }
    const SimplexPoint& cand = built.targets[a];
    for (Predicate pred : {Predicate::kEss, Predicate::kIss, Predicate::kEiss, Predicate::kGIss}) {
      const std::string key = pre + "." + to_string(pred);
      try {
        NeighborhoodOptions no;
        no.seed = options.seed;
        const auto margin = predicate_margin(pred, built.spec.populations[a], cand);
        const StabilityReport r = neighborhood_report(pred, margin, cand, no);
        put(key + ".fraction_satisfied", num(r.fraction_satisfied));
        put(key + ".min_margin", num(r.min_margin));
      } catch (const Error& e) {
        put(key, std::string("unavailable: ") + e.what());
      }
    }
    const IncentiveSpec& inc = built.spec.populations[a].incentive;
    const IncentiveClassification c =
        classify_incentive(inc, inc.landscape, 10000, options.seed);
    put(pre + ".classify.payoff_positive", flag(c.payoff_positive));
    put(pre + ".classify.weakly_payoff_positive", flag(c.weakly_payoff_positive));
    put(pre + ".classify.payoff_monotone", flag(c.payoff_monotone));
    put(pre + ".classify.aggregate_monotone", flag(c.aggregate_monotone));
  }
  for (const auto& [key, tr] : result.combined) {
    put(name + "." + key, to_string(tr.verdict));
    put(name + "." + key + ".local_maxima", std::to_string(tr.local_maxima()));
    put(name + "." + key + ".samples", std::to_string(tr.values.size()));
  }
  put(name + ".converged", flag(result.converged));
  for (const auto& e : result.runtime_errors) put(name + ".error", e);
  return lines;
}

}  // namespace evodyn::cli
