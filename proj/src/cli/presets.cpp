#include "evodyn/cli/presets.hpp"

#include <fmt/format.h>

namespace evodyn::cli {

namespace {

// Captions of the first figures give no step size; h = 1/100 throughout.
constexpr double kDefaultH = 0.01;

const std::vector<double> kCorner = {0.1, 0.1, 0.8};

PopulationConfig rsp_population(double a, double b, std::vector<double> x0) {
  PopulationConfig p;
  p.n = 3;
  p.matrix.rsp_a = a;
  p.matrix.rsp_b = b;
  p.x0 = std::move(x0);
  p.timescale.kind = "uniform";
  p.timescale.h = kDefaultH;
  return p;
}

IncentiveConfig incentive(const std::string& kind) {
  IncentiveConfig c;
  c.kind = kind;
  return c;
}

IncentiveConfig q_replicator(double q) {
  IncentiveConfig c = incentive("q_replicator");
  c.q = q;
  return c;
}

GeometryConfig geometry(const std::string& kind) {
  GeometryConfig g;
  g.kind = kind;
  return g;
}

GeometryConfig power_escort(double q) {
  GeometryConfig g = geometry("power_escort");
  g.q = q;
  return g;
}

TimeScaleConfig uniform(double h) {
  TimeScaleConfig t;
  t.kind = "uniform";
  t.h = h;
  return t;
}

DivergenceConfig divergence(const std::string& kind) {
  DivergenceConfig d;
  d.kind = kind;
  return d;
}

DivergenceConfig q_div(double q) {
  DivergenceConfig d = divergence("q");
  d.q = q;
  return d;
}

ScenarioConfig scenario(std::string name, long steps) {
  ScenarioConfig s;
  s.name = name;
  s.output = std::move(name);
  s.steps = steps;
  return s;
}

std::string tag(const char* stem, const char* key, double v) {
  return fmt::format("{}_{}{:g}", stem, key, v);
}

ConfigDocument q_replicator_sweep(const char* stem, double a, double b,
                                  const std::vector<double>& x0) {
  ConfigDocument doc;
  for (double q : {0.5, 1.0, 1.5, 2.0, 2.5, 4.0}) {
    ScenarioConfig s = scenario(tag(stem, "q", q), 20000);
    PopulationConfig p = rsp_population(a, b, x0);
    p.incentive = q_replicator(q);
    p.geometry = geometry("shahshahani");
    s.populations.push_back(p);
    s.divergences = {divergence("kl")};
    doc.scenarios.push_back(s);
  }
  return doc;
}

ConfigDocument fig2() {
  ConfigDocument doc;
  for (double q : {0.78, 1.0, 2.5}) {
    ScenarioConfig s = scenario(tag("fig2", "q", q), 10000);
    PopulationConfig p = rsp_population(-1.0, -2.0, kCorner);
    p.incentive = q_replicator(q);
    p.geometry = geometry("shahshahani");
    s.populations.push_back(p);
    s.divergences = {divergence("kl")};
    s.scan = ScanConfig{"iss", 30, 0};
    doc.scenarios.push_back(s);
  }
  return doc;
}

ConfigDocument fig4() {
  // The text's replicator incentive x_i f_i is not zero-sum, so the escort
  // changes the dynamic. The caption gives no initial point; the fig3
  // point on the same landscape is used.
  ConfigDocument doc;
  for (double q : {0.2, 0.8, 1.0, 2.0, 4.0}) {
    ScenarioConfig s = scenario(tag("fig4", "q", q), 20000);
    PopulationConfig p = rsp_population(1.0, 2.0, {0.125, 0.125, 0.75});
    p.incentive = q_replicator(1.0);
    p.geometry = power_escort(q);
    s.populations.push_back(p);
    s.divergences = {divergence("kl"), divergence("escort")};
    doc.scenarios.push_back(s);
  }
  return doc;
}

ConfigDocument double_q(const char* stem) {
  ConfigDocument doc;
  for (double q : {0.5, 1.0, 1.5, 2.0, 4.0}) {
    ScenarioConfig s = scenario(tag(stem, "q", q), 20000);
    PopulationConfig p = rsp_population(-1.0, -2.0, kCorner);
    p.incentive = q_replicator(q);
    p.geometry = power_escort(q);
    s.populations.push_back(p);
    s.divergences = {divergence("kl"), q_div(q)};
    doc.scenarios.push_back(s);
  }
  return doc;
}

ConfigDocument brfp() {
  ConfigDocument doc;
  for (const char* kind : {"uniform", "harmonic"}) {
    const bool fixed = std::string(kind) == "uniform";
    ScenarioConfig s = scenario(fixed ? "brfp_h1_3" : "brfp_harmonic", 10000);
    PopulationConfig p = rsp_population(-1.0, -2.0, kCorner);
    p.incentive = incentive("best_reply");
    p.geometry = geometry("shahshahani");
    if (fixed) {
      p.timescale = uniform(1.0 / 3.0);
    } else {
      p.timescale = TimeScaleConfig{};
      p.timescale.kind = "harmonic";
    }
    s.populations.push_back(p);
    s.divergences = {divergence("kl")};
    s.convergence_epsilon = 0.01;
    doc.scenarios.push_back(s);
  }
  return doc;
}

ConfigDocument two_population(const char* name, long steps, bool logit) {
  ScenarioConfig s = scenario(name, steps);
  PopulationConfig p1 = rsp_population(-1.0, -2.0, {0.2, 0.2, 0.6});
  p1.incentive = incentive("replicator");
  p1.geometry = geometry("shahshahani");
  p1.timescale = uniform(0.1);
  PopulationConfig p2 = rsp_population(-1.0, -2.0, {0.6, 0.2, 0.2});
  if (logit) {
    p2.incentive = incentive("logit");
    p2.incentive.eta = 0.4;
  } else {
    p2.incentive = q_replicator(2.0);
  }
  p2.geometry = geometry("euclidean");
  p2.timescale = uniform(0.1);
  s.populations = {p1, p2};
  s.divergences = {divergence("escort")};
  s.convergence_epsilon = 0.05;
  ConfigDocument doc;
  doc.scenarios.push_back(s);
  return doc;
}

ConfigDocument fig10() {
  ConfigDocument doc;
  for (double h2 : {0.05, 0.1}) {
    ScenarioConfig s = scenario(h2 == 0.05 ? "fig10_mixed" : "fig10_equal", 1000);
    PopulationConfig p1 = rsp_population(-1.0, -2.0, {0.2, 0.2, 0.6});
    p1.incentive = incentive("replicator");
    p1.geometry = geometry("shahshahani");
    p1.timescale = uniform(0.1);
    PopulationConfig p2 = rsp_population(-1.0, -4.0, {0.6, 0.2, 0.2});
    p2.incentive = incentive("replicator");
    p2.geometry = power_escort(2.0);
    p2.timescale = uniform(h2);
    s.populations = {p1, p2};
    // KL for the first population, the q = 2 divergence for the second.
    s.divergences = {divergence("escort")};
    s.convergence_epsilon = 0.05;
    doc.scenarios.push_back(s);
  }
  return doc;
}

ConfigDocument fig11() {
  ConfigDocument doc;
  for (double eps : {0.1, 0.4, 0.8}) {
    ScenarioConfig s = scenario(tag("fig11", "eps", eps), 20000);
    PopulationConfig p = rsp_population(1.0, 2.0, kCorner);
    p.incentive = incentive("best_reply");
    p.incentive.offspring_share = true;
    p.geometry = geometry("shahshahani");
    p.mutation_epsilon = eps;
    s.populations.push_back(p);
    s.divergences = {divergence("kl")};
    doc.scenarios.push_back(s);
  }
  return doc;
}

}  // namespace

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids = {"fig1a", "fig1b", "fig2", "fig3",
                                               "fig4",  "fig5",  "fig6", "brfp",
                                               "fig8",  "fig9",  "fig10", "fig11"};
  return ids;
}

namespace {

ConfigDocument lookup(const std::string& id) {
  if (id == "fig1a") return q_replicator_sweep("fig1a", -1.0, -2.0, kCorner);
  if (id == "fig1b") {
    return q_replicator_sweep("fig1b", -1.0, -2.0, {1.0 / 83.0, 2.0 / 83.0, 80.0 / 83.0});
  }
  if (id == "fig2") return fig2();
  if (id == "fig3") return q_replicator_sweep("fig3", 1.0, 2.0, {0.125, 0.125, 0.75});
  if (id == "fig4") return fig4();
  if (id == "fig5") return double_q("fig5");
  if (id == "fig6") return double_q("fig6");
  if (id == "brfp") return brfp();
  if (id == "fig8") return two_population("fig8", 500, true);
  if (id == "fig9") return two_population("fig9", 10000, false);
  if (id == "fig10") return fig10();
  if (id == "fig11") return fig11();
  std::string known;
  for (const auto& k : preset_ids()) known += (known.empty() ? "" : ", ") + k;
  throw ConfigError("figure", fmt::format("unknown id '{}'; available: {}", id, known));
}

}  // namespace

ConfigDocument figure(const std::string& id) {
  ConfigDocument doc = lookup(id);
  for (const auto& s : doc.scenarios) validate(s, id + "." + s.name);
  return doc;
}

}  // namespace evodyn::cli
