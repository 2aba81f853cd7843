#include "evodyn/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "evodyn/errors.hpp"

namespace evodyn::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return fmt::format("{}[{}]", path, i);
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(join(path, key), "unknown key");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

std::optional<double> opt_number(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) return std::nullopt;
  return get_number(j.at(key), join(path, key));
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

long get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long>();
}

std::vector<double> get_vector(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], index(path, i)));
  return out;
}

std::vector<std::vector<double>> get_rows(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_vector(j[i], index(path, i)));
  return out;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows, std::size_t n,
                 const std::string& path) {
  if (rows.size() != n) {
    throw ConfigError(path, fmt::format("expected {} rows, got {}", n, rows.size()));
  }
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw ConfigError(index(path, i), fmt::format("expected {} entries", n));
    }
    for (std::size_t k = 0; k < n; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return m;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

MatrixConfig parse_matrix(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"rsp", "rows"});
  MatrixConfig m;
  if (j.contains("rsp") == j.contains("rows")) {
    throw ConfigError(path, "give exactly one of rsp or rows");
  }
  if (j.contains("rsp")) {
    const auto ab = get_vector(j.at("rsp"), join(path, "rsp"));
    if (ab.size() != 2) throw ConfigError(join(path, "rsp"), "expected [a, b]");
    m.rsp_a = ab[0];
    m.rsp_b = ab[1];
  } else {
    m.rows = get_rows(j.at("rows"), join(path, "rows"));
  }
  return m;
}

IncentiveConfig parse_incentive(const json& j, const std::string& path) {
  IncentiveConfig c;
  if (j.is_string()) {
    c.kind = j.get<std::string>();
    return c;
  }
  expect_object(j, path);
  reject_unknown(j, path, {"kind", "q", "eta", "tie_rule", "offspring_share"});
  if (!j.contains("kind")) throw ConfigError(join(path, "kind"), "missing");
  c.kind = get_string(j.at("kind"), join(path, "kind"));
  c.q = opt_number(j, "q", path);
  c.eta = opt_number(j, "eta", path);
  if (j.contains("tie_rule")) c.tie_rule = get_string(j.at("tie_rule"), join(path, "tie_rule"));
  if (j.contains("offspring_share")) {
    if (!j.at("offspring_share").is_boolean()) {
      throw ConfigError(join(path, "offspring_share"), "expected a boolean");
    }
    c.offspring_share = j.at("offspring_share").get<bool>();
  }
  return c;
}

GeometryConfig parse_geometry(const json& j, const std::string& path) {
  GeometryConfig c;
  if (j.is_string()) {
    c.kind = j.get<std::string>();
    return c;
  }
  expect_object(j, path);
  reject_unknown(j, path, {"kind", "q", "beta", "rows"});
  if (!j.contains("kind")) throw ConfigError(join(path, "kind"), "missing");
  c.kind = get_string(j.at("kind"), join(path, "kind"));
  c.q = opt_number(j, "q", path);
  c.beta = opt_number(j, "beta", path);
  if (j.contains("rows")) c.rows = get_rows(j.at("rows"), join(path, "rows"));
  return c;
}

TimeScaleConfig parse_timescale(const json& j, const std::string& path) {
  TimeScaleConfig c;
  if (j.is_string()) {
    c.kind = j.get<std::string>();
    return c;
  }
  expect_object(j, path);
  reject_unknown(j, path, {"kind", "h", "r", "dt", "integrator", "steps"});
  if (!j.contains("kind")) throw ConfigError(join(path, "kind"), "missing");
  c.kind = get_string(j.at("kind"), join(path, "kind"));
  c.h = opt_number(j, "h", path);
  c.r = opt_number(j, "r", path);
  c.dt = opt_number(j, "dt", path);
  if (j.contains("integrator")) {
    c.integrator = get_string(j.at("integrator"), join(path, "integrator"));
  }
  if (j.contains("steps")) c.steps = get_vector(j.at("steps"), join(path, "steps"));
  return c;
}

PopulationConfig parse_population(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path,
                 {"n", "matrix", "incentive", "geometry", "timescale", "mutation_epsilon", "x0"});
  for (const char* key : {"n", "matrix", "incentive", "geometry", "timescale", "x0"}) {
    if (!j.contains(key)) throw ConfigError(join(path, key), "missing");
  }
  PopulationConfig p;
  p.n = static_cast<int>(get_integer(j.at("n"), join(path, "n")));
  p.matrix = parse_matrix(j.at("matrix"), join(path, "matrix"));
  p.incentive = parse_incentive(j.at("incentive"), join(path, "incentive"));
  p.geometry = parse_geometry(j.at("geometry"), join(path, "geometry"));
  p.timescale = parse_timescale(j.at("timescale"), join(path, "timescale"));
  p.mutation_epsilon = opt_number(j, "mutation_epsilon", path);
  p.x0 = get_vector(j.at("x0"), join(path, "x0"));
  return p;
}

DivergenceConfig parse_divergence(const json& j, const std::string& path) {
  DivergenceConfig d;
  if (j.is_string()) {
    d.kind = j.get<std::string>();
    return d;
  }
  expect_object(j, path);
  reject_unknown(j, path, {"kind", "q"});
  if (!j.contains("kind")) throw ConfigError(join(path, "kind"), "missing");
  d.kind = get_string(j.at("kind"), join(path, "kind"));
  d.q = opt_number(j, "q", path);
  return d;
}

ScanConfig parse_scan(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"predicate", "resolution", "population"});
  ScanConfig s;
  if (j.contains("predicate")) s.predicate = get_string(j.at("predicate"), join(path, "predicate"));
  if (j.contains("resolution")) {
    s.resolution = static_cast<int>(get_integer(j.at("resolution"), join(path, "resolution")));
  }
  if (j.contains("population")) {
    s.population = static_cast<int>(get_integer(j.at("population"), join(path, "population")));
  }
  return s;
}

ScenarioConfig parse_scenario(const json& j, const std::string& path, std::size_t position) {
  expect_object(j, path);
  reject_unknown(j, path,
                 {"name", "populations", "steps", "divergences", "target", "boundary_policy",
                  "output", "coupling", "convergence_epsilon", "scan"});
  for (const char* key : {"populations", "steps"}) {
    if (!j.contains(key)) throw ConfigError(join(path, key), "missing");
  }
  ScenarioConfig s;
  s.name = j.contains("name") ? get_string(j.at("name"), join(path, "name"))
                              : fmt::format("scenario{}", position);
  const json& pops = j.at("populations");
  if (!pops.is_array()) throw ConfigError(join(path, "populations"), "expected an array");
  for (std::size_t i = 0; i < pops.size(); ++i) {
    s.populations.push_back(parse_population(pops[i], index(join(path, "populations"), i)));
  }
  s.steps = get_integer(j.at("steps"), join(path, "steps"));
  if (j.contains("divergences")) {
    const json& ds = j.at("divergences");
    if (!ds.is_array()) throw ConfigError(join(path, "divergences"), "expected an array");
    for (std::size_t i = 0; i < ds.size(); ++i) {
      s.divergences.push_back(parse_divergence(ds[i], index(join(path, "divergences"), i)));
    }
  }
  if (j.contains("target")) {
    const json& t = j.at("target");
    const std::string tp = join(path, "target");
    if (t.is_string()) {
      if (t.get<std::string>() != "barycenter") {
        throw ConfigError(tp, "expected \"barycenter\" or coordinates");
      }
    } else if (t.is_array() && !t.empty() && t[0].is_array()) {
      s.target = get_rows(t, tp);
    } else {
      s.target.push_back(get_vector(t, tp));
    }
  }
  if (j.contains("boundary_policy")) {
    s.boundary_policy = get_string(j.at("boundary_policy"), join(path, "boundary_policy"));
  }
  s.output = j.contains("output") ? get_string(j.at("output"), join(path, "output")) : s.name;
  if (j.contains("coupling")) s.coupling = get_string(j.at("coupling"), join(path, "coupling"));
  if (j.contains("convergence_epsilon")) {
    s.convergence_epsilon =
        get_number(j.at("convergence_epsilon"), join(path, "convergence_epsilon"));
  }
  if (j.contains("scan")) s.scan = parse_scan(j.at("scan"), join(path, "scan"));
  return s;
}

void put_opt(json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

json population_json(const PopulationConfig& p) {
  json j;
  j["n"] = p.n;
  if (p.matrix.rsp_a) {
    j["matrix"] = {{"rsp", {*p.matrix.rsp_a, *p.matrix.rsp_b}}};
  } else {
    j["matrix"] = {{"rows", p.matrix.rows}};
  }
  json inc = {{"kind", p.incentive.kind}};
  put_opt(inc, "q", p.incentive.q);
  put_opt(inc, "eta", p.incentive.eta);
  if (p.incentive.tie_rule) inc["tie_rule"] = *p.incentive.tie_rule;
  if (p.incentive.offspring_share) inc["offspring_share"] = true;
  j["incentive"] = inc;
  json geo = {{"kind", p.geometry.kind}};
  put_opt(geo, "q", p.geometry.q);
  put_opt(geo, "beta", p.geometry.beta);
  if (!p.geometry.rows.empty()) geo["rows"] = p.geometry.rows;
  j["geometry"] = geo;
  json ts = {{"kind", p.timescale.kind}};
  put_opt(ts, "h", p.timescale.h);
  put_opt(ts, "r", p.timescale.r);
  put_opt(ts, "dt", p.timescale.dt);
  if (p.timescale.integrator) ts["integrator"] = *p.timescale.integrator;
  if (!p.timescale.steps.empty()) ts["steps"] = p.timescale.steps;
  j["timescale"] = ts;
  put_opt(j, "mutation_epsilon", p.mutation_epsilon);
  j["x0"] = p.x0;
  return j;
}

void check(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

void validate_population(const PopulationConfig& p, const std::string& path) {
  check(p.n >= 2, join(path, "n"), "must be >= 2");
  const auto n = static_cast<std::size_t>(p.n);
  if (p.matrix.rsp_a) {
    check(n == 3, join(path, "matrix.rsp"), "rsp needs n = 3");
  } else {
    to_matrix(p.matrix.rows, n, join(path, "matrix.rows"));
  }

  const std::string ip = join(path, "incentive");
  static const std::set<std::string> kinds = {"replicator", "q_replicator", "best_reply",
                                              "logit",      "projection",   "fitness_only",
                                              "ts_replicator"};
  check(kinds.count(p.incentive.kind) == 1, join(ip, "kind"),
        "unknown incentive kind '" + p.incentive.kind + "'");
  const bool wants_q = p.incentive.kind == "q_replicator";
  check(p.incentive.q.has_value() == wants_q, join(ip, "q"),
        wants_q ? "q_replicator needs q" : "q is only valid for q_replicator");
  if (wants_q) check(*p.incentive.q >= 0.0, join(ip, "q"), "must be >= 0");
  const bool wants_eta = p.incentive.kind == "logit";
  check(p.incentive.eta.has_value() == wants_eta, join(ip, "eta"),
        wants_eta ? "logit needs eta" : "eta is only valid for logit");
  if (wants_eta) check(*p.incentive.eta > 0.0, join(ip, "eta"), "must be > 0");
  if (p.incentive.tie_rule) {
    check(p.incentive.kind == "best_reply", join(ip, "tie_rule"),
          "tie_rule is only valid for best_reply");
    check(*p.incentive.tie_rule == "lowest_index" || *p.incentive.tie_rule == "uniform_mix",
          join(ip, "tie_rule"), "expected lowest_index or uniform_mix");
  }

  const std::string gp = join(path, "geometry");
  const std::string& g = p.geometry.kind;
  check(g == "shahshahani" || g == "euclidean" || g == "power_escort" || g == "scaled" ||
            g == "constant",
        join(gp, "kind"), "unknown geometry kind '" + g + "'");
  check(p.geometry.q.has_value() == (g == "power_escort"), join(gp, "q"),
        g == "power_escort" ? "power_escort needs q" : "q is only valid for power_escort");
  if (p.geometry.q) check(*p.geometry.q >= 0.0, join(gp, "q"), "must be >= 0");
  check(p.geometry.beta.has_value() == (g == "scaled"), join(gp, "beta"),
        g == "scaled" ? "scaled needs beta" : "beta is only valid for scaled");
  if (p.geometry.beta) check(*p.geometry.beta > 0.0, join(gp, "beta"), "must be > 0");
  check(p.geometry.rows.empty() == (g != "constant"), join(gp, "rows"),
        g == "constant" ? "constant needs rows" : "rows are only valid for constant");
  if (g == "constant") to_matrix(p.geometry.rows, n, join(gp, "rows"));

  const std::string tp = join(path, "timescale");
  const TimeScaleConfig& t = p.timescale;
  check(t.kind == "uniform" || t.kind == "harmonic" || t.kind == "geometric" ||
            t.kind == "explicit" || t.kind == "continuous",
        join(tp, "kind"), "unknown time scale kind '" + t.kind + "'");
  check(t.h.has_value() == (t.kind == "uniform"), join(tp, "h"),
        t.kind == "uniform" ? "uniform needs h" : "h is only valid for uniform");
  if (t.h) check(*t.h > 0.0 && *t.h <= 1.0, join(tp, "h"), "must lie in (0, 1]");
  check(t.r.has_value() == (t.kind == "geometric"), join(tp, "r"),
        t.kind == "geometric" ? "geometric needs r" : "r is only valid for geometric");
  if (t.r) check(*t.r > 0.0 && *t.r <= 1.0, join(tp, "r"), "must lie in (0, 1]");
  check(!t.dt || t.kind == "continuous", join(tp, "dt"), "dt is only valid for continuous");
  if (t.dt) check(*t.dt > 0.0, join(tp, "dt"), "must be > 0");
  check(!t.integrator || t.kind == "continuous", join(tp, "integrator"),
        "integrator is only valid for continuous");
  if (t.integrator) {
    check(*t.integrator == "rk4" || *t.integrator == "euler", join(tp, "integrator"),
          "expected rk4 or euler");
  }
  check(t.steps.empty() == (t.kind != "explicit"), join(tp, "steps"),
        t.kind == "explicit" ? "explicit needs steps" : "steps are only valid for explicit");
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    check(t.steps[i] > 0.0 && t.steps[i] <= 1.0, index(join(tp, "steps"), i),
          "must lie in (0, 1]");
  }

  if (p.mutation_epsilon) {
    check(*p.mutation_epsilon >= 0.0 && *p.mutation_epsilon <= 1.0,
          join(path, "mutation_epsilon"), "must lie in [0, 1]");
  }
  check(p.x0.size() == n, join(path, "x0"), fmt::format("expected {} coordinates", n));
  check(SimplexPoint::satisfies(to_vector(p.x0)), join(path, "x0"), "not a simplex point");
}

}  // namespace

Predicate parse_predicate(const std::string& name) {
  if (name == "ess") return Predicate::kEss;
  if (name == "iss") return Predicate::kIss;
  if (name == "eiss") return Predicate::kEiss;
  if (name == "giss" || name == "g_iss") return Predicate::kGIss;
  throw ConfigError("predicate", "expected ess, iss, eiss or giss, got '" + name + "'");
}

void validate(const ScenarioConfig& s, const std::string& path) {
  check(!s.name.empty(), join(path, "name"), "must not be empty");
  check(!s.output.empty(), join(path, "output"), "must not be empty");
  check(!s.populations.empty(), join(path, "populations"), "needs at least one population");
  for (std::size_t i = 0; i < s.populations.size(); ++i) {
    validate_population(s.populations[i], index(join(path, "populations"), i));
  }
  check(s.steps >= 1, join(path, "steps"), "must be >= 1");
  for (std::size_t i = 0; i < s.populations.size(); ++i) {
    const auto& t = s.populations[i].timescale;
    check(t.kind != "explicit" || static_cast<long>(t.steps.size()) >= s.steps,
          index(join(path, "populations"), i) + ".timescale.steps",
          "fewer explicit steps than the scenario runs");
  }
  for (std::size_t i = 0; i < s.divergences.size(); ++i) {
    const auto& d = s.divergences[i];
    const std::string dp = index(join(path, "divergences"), i);
    check(d.kind == "kl" || d.kind == "q" || d.kind == "escort" || d.kind == "metric",
          join(dp, "kind"), "expected kl, q, escort or metric");
    check(d.q.has_value() == (d.kind == "q"), join(dp, "q"),
          d.kind == "q" ? "q divergence needs q" : "q is only valid for the q divergence");
    if (d.q) check(*d.q >= 0.0, join(dp, "q"), "must be >= 0");
    if (d.kind == "escort") {
      for (const auto& p : s.populations) {
        check(p.geometry.kind != "constant", dp, "constant metrics have no escort");
      }
    }
  }
  const std::string tp = join(path, "target");
  check(s.target.empty() || s.target.size() == 1 || s.target.size() == s.populations.size(),
        tp, "expected one target or one per population");
  for (std::size_t i = 0; i < s.target.size(); ++i) {
    const std::string ep = s.target.size() == 1 ? tp : index(tp, i);
    for (std::size_t a = 0; a < s.populations.size(); ++a) {
      if (s.target.size() > 1 && a != i) continue;
      check(s.target[i].size() == static_cast<std::size_t>(s.populations[a].n), ep,
            "target size does not match the population");
    }
    check(SimplexPoint::satisfies(to_vector(s.target[i])), ep, "not a simplex point");
  }
  check(s.boundary_policy == "record_and_continue" || s.boundary_policy == "clip_renormalize" ||
            s.boundary_policy == "halt",
        join(path, "boundary_policy"), "expected record_and_continue, clip_renormalize or halt");
  check(s.coupling == "independent" || s.coupling == "cross", join(path, "coupling"),
        "expected independent or cross");
  if (s.coupling == "cross") {
    for (std::size_t i = 0; i < s.populations.size(); ++i) {
      check(s.populations[i].n == s.populations[(i + 1) % s.populations.size()].n,
            join(path, "coupling"), "cross coupling needs equal population sizes");
      check(s.populations[i].timescale.kind != "continuous", join(path, "coupling"),
            "cross coupling needs discrete time scales");
    }
  }
  check(s.convergence_epsilon > 0.0, join(path, "convergence_epsilon"), "must be > 0");
  if (s.scan) {
    const std::string sp = join(path, "scan");
    try {
      parse_predicate(s.scan->predicate);
    } catch (const ConfigError& e) {
      throw ConfigError(join(sp, "predicate"), e.what());
    }
    check(s.scan->resolution >= 2, join(sp, "resolution"), "must be >= 2");
    check(s.scan->population >= 0 &&
              static_cast<std::size_t>(s.scan->population) < s.populations.size(),
          join(sp, "population"), "no such population");
  }
  // Anything the engine still rejects is a schema error too.
  build(s, path);
}

ConfigDocument parse_config(const json& j) {
  ConfigDocument doc;
  if (j.is_object() && j.contains("scenarios")) {
    reject_unknown(j, "", {"scenarios"});
    const json& list = j.at("scenarios");
    if (!list.is_array() || list.empty()) {
      throw ConfigError("scenarios", "expected a non-empty array");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      doc.scenarios.push_back(parse_scenario(list[i], index("scenarios", i), i));
    }
  } else {
    doc.scenarios.push_back(parse_scenario(j, "", 0));
  }
  std::set<std::string> outputs;
  for (std::size_t i = 0; i < doc.scenarios.size(); ++i) {
    const std::string path = doc.scenarios.size() == 1 && !j.contains("scenarios")
                                 ? std::string()
                                 : index("scenarios", i);
    validate(doc.scenarios[i], path);
    if (!outputs.insert(doc.scenarios[i].output).second) {
      throw ConfigError(join(path, "output"), "duplicate output '" + doc.scenarios[i].output + "'");
    }
  }
  return doc;
}

ConfigDocument load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
  return parse_config(j);
}

json to_json(const ScenarioConfig& s) {
  json j;
  j["name"] = s.name;
  json pops = json::array();
  for (const auto& p : s.populations) pops.push_back(population_json(p));
  j["populations"] = pops;
  j["steps"] = s.steps;
  json ds = json::array();
  for (const auto& d : s.divergences) {
    if (d.q) {
      ds.push_back({{"kind", d.kind}, {"q", *d.q}});
    } else {
      ds.push_back(d.kind);
    }
  }
  j["divergences"] = ds;
  if (s.target.empty()) {
    j["target"] = "barycenter";
  } else if (s.target.size() == 1) {
    j["target"] = s.target.front();
  } else {
    j["target"] = s.target;
  }
  j["boundary_policy"] = s.boundary_policy;
  j["output"] = s.output;
  j["coupling"] = s.coupling;
  j["convergence_epsilon"] = s.convergence_epsilon;
  if (s.scan) {
    j["scan"] = {{"predicate", s.scan->predicate},
                 {"resolution", s.scan->resolution},
                 {"population", s.scan->population}};
  }
  return j;
}

json to_json(const ConfigDocument& doc) {
  json list = json::array();
  for (const auto& s : doc.scenarios) list.push_back(to_json(s));
  return {{"scenarios", list}};
}

BuiltScenario build(const ScenarioConfig& s, const std::string& path) {
  BuiltScenario out;
  std::vector<FitnessLandscape> landscapes;
  try {
    for (std::size_t a = 0; a < s.populations.size(); ++a) {
      const PopulationConfig& p = s.populations[a];
      const auto n = static_cast<std::size_t>(p.n);
      const std::string pp = index(join(path, "populations"), a);

      const GameMatrix game = p.matrix.rsp_a
                                  ? rsp_matrix(*p.matrix.rsp_a, *p.matrix.rsp_b)
                                  : GameMatrix(to_matrix(p.matrix.rows, n, join(pp, "matrix.rows")));
      const FitnessLandscape f = FitnessLandscape::linear(game);
      landscapes.push_back(f);

      IncentiveSpec inc;
      const std::string& k = p.incentive.kind;
      if (k == "replicator") inc = IncentiveSpec::replicator(f);
      if (k == "q_replicator") inc = IncentiveSpec::q_replicator(f, *p.incentive.q);
      if (k == "best_reply") {
        inc = IncentiveSpec::best_reply(f, p.incentive.tie_rule == "uniform_mix"
                                               ? TieRule::kUniformMix
                                               : TieRule::kLowestIndex);
      }
      if (k == "logit") inc = IncentiveSpec::logit(f, *p.incentive.eta);
      if (k == "projection") inc = IncentiveSpec::projection(f);
      if (k == "fitness_only") inc = IncentiveSpec::fitness_only(f);
      if (k == "ts_replicator") inc = IncentiveSpec::ts_replicator(f);
      inc.offspring_share = p.incentive.offspring_share;

      DynamicSpec d;
      d.incentive = inc;
      const std::string& g = p.geometry.kind;
      if (g == "shahshahani") d.geometry = MetricField::shahshahani();
      if (g == "euclidean") d.geometry = MetricField::euclidean();
      if (g == "power_escort") {
        d.geometry = MetricField::diagonal_escort(Escort::power(*p.geometry.q));
      }
      if (g == "scaled") d.geometry = MetricField::diagonal_escort(Escort::scaled(*p.geometry.beta));
      if (g == "constant") {
        d.geometry = MetricField::constant(to_matrix(p.geometry.rows, n, join(pp, "geometry.rows")));
      }

      const TimeScaleConfig& t = p.timescale;
      if (t.kind == "uniform") d.timescale = TimeScale::uniform(*t.h);
      if (t.kind == "harmonic") d.timescale = TimeScale::harmonic();
      if (t.kind == "geometric") d.timescale = TimeScale::geometric(*t.r);
      if (t.kind == "explicit") d.timescale = TimeScale::explicit_steps(t.steps);
      if (t.kind == "continuous") {
        d.timescale = TimeScale::continuous(
            t.dt.value_or(1e-3),
            t.integrator == "euler" ? TimeScale::Integrator::kEuler : TimeScale::Integrator::kRk4);
      }
      if (p.mutation_epsilon) {
        d.mutation = uniform_mutation_matrix(static_cast<Eigen::Index>(n), *p.mutation_epsilon);
      }
      if (s.boundary_policy == "clip_renormalize") {
        d.boundary_policy = BoundaryPolicy::kClipRenormalize;
      } else if (s.boundary_policy == "halt") {
        d.boundary_policy = BoundaryPolicy::kHalt;
      }
      d.validate(static_cast<Eigen::Index>(n));
      out.spec.populations.push_back(d);
      out.x0.emplace_back(to_vector(p.x0));

      if (s.target.empty()) {
        out.targets.push_back(barycenter(static_cast<Eigen::Index>(n)));
      } else {
        out.targets.emplace_back(to_vector(s.target.size() == 1 ? s.target[0] : s.target[a]));
      }

      std::vector<DivergenceSpec> divs;
      for (const auto& dc : s.divergences) {
        if (dc.kind == "kl") divs.push_back(DivergenceSpec::kl());
        if (dc.kind == "q") divs.push_back(DivergenceSpec::q_divergence(*dc.q));
        if (dc.kind == "escort") {
          divs.push_back(DivergenceSpec::escort_divergence(d.geometry.diagonal_escorts()));
        }
        if (dc.kind == "metric") divs.push_back(DivergenceSpec::metric_divergence(d.geometry));
      }
      out.divergences.push_back(std::move(divs));
    }
    if (s.coupling == "cross") out.spec.coupling = Coupling::cross(landscapes);
    out.spec.validate();
  } catch (const Error& e) {
    throw ConfigError(path.empty() ? std::string("config") : path, e.what());
  }
  return out;
}

}  // namespace evodyn::cli
