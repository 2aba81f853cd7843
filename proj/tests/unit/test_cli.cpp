#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "evodyn/cli/config.hpp"
#include "evodyn/cli/presets.hpp"
#include "evodyn/cli/runner.hpp"
#include "support.hpp"

using namespace evodyn;
using namespace evodyn::cli;
using nlohmann::json;
using test::vec;

namespace fs = std::filesystem;

namespace {

json small_scenario() {
  return json::parse(R"({
    "name": "small",
    "steps": 50,
    "divergences": ["kl", {"kind": "q", "q": 2}],
    "populations": [{
      "n": 3,
      "matrix": {"rsp": [-1, -2]},
      "incentive": {"kind": "q_replicator", "q": 2},
      "geometry": {"kind": "power_escort", "q": 2},
      "timescale": {"kind": "uniform", "h": 0.01},
      "x0": [0.1, 0.1, 0.8]
    }]
  })");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("evodyn_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

int tool(const std::string& args) {
  const std::string cmd = std::string(EVODYN_TOOL) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  out << j.dump(2);
}

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string find_key(const std::vector<std::string>& lines, const std::string& key) {
  for (const auto& l : lines) {
    if (l.rfind(key + "=", 0) == 0) return l.substr(key.size() + 1);
  }
  return "<missing>";
}

}  // namespace

TEST_CASE("parse a scenario") {
  const ConfigDocument doc = parse_config(small_scenario());
  REQUIRE(doc.scenarios.size() == 1);
  const ScenarioConfig& s = doc.scenarios[0];
  CHECK(s.name == "small");
  CHECK(s.output == "small");
  CHECK(s.steps == 50);
  REQUIRE(s.divergences.size() == 2);
  CHECK(s.divergences[1].q == 2.0);
  CHECK(s.populations[0].incentive.q == 2.0);
  CHECK(s.target.empty());
  const BuiltScenario b = build(s);
  CHECK(b.x0[0].coords() == vec({0.1, 0.1, 0.8}));
  CHECK(b.targets[0].coords() == barycenter(3).coords());
  CHECK(b.divergences[0][1].name() == "q2_divergence");
  // A bare scenario and a one-element document are the same thing.
  CHECK(parse_config(json{{"scenarios", {small_scenario()}}}) == doc);
}

TEST_CASE("schema errors carry field paths") {
  json j = small_scenario();
  j["steps"] = 0;
  CHECK(error_of(j).rfind("steps:", 0) == 0);

  j = small_scenario();
  j["populations"][0]["incentive"].erase("q");
  CHECK(error_of(j).find("populations[0].incentive.q") != std::string::npos);

  j = small_scenario();
  j["populations"][0]["incentive"]["eta"] = 1.0;
  CHECK(error_of(j).find("incentive.eta") != std::string::npos);

  j = small_scenario();
  j["populations"][0]["x0"] = {0.5, 0.6, 0.1};
  CHECK(error_of(j).find("populations[0].x0") != std::string::npos);

  j = small_scenario();
  j["populations"][0]["colour"] = "red";
  CHECK(error_of(j).find("colour") != std::string::npos);

  j = small_scenario();
  j["populations"][0]["timescale"] = {{"kind", "uniform"}, {"h", 2.0}};
  CHECK(error_of(j).find("timescale") != std::string::npos);

  j = small_scenario();
  j["populations"][0]["geometry"] = {{"kind", "constant"}, {"rows", {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}};
  j["divergences"] = {"escort"};
  CHECK(error_of(j).find("divergences") != std::string::npos);

  j = json{{"scenarios", {small_scenario(), small_scenario()}}};
  CHECK(error_of(j).find("output") != std::string::npos);
}

TEST_CASE("every preset round-trips through JSON") {
  for (const auto& id : preset_ids()) {
    CAPTURE(id);
    const ConfigDocument doc = figure(id);
    CHECK_FALSE(doc.scenarios.empty());
    const json j = to_json(doc);
    CHECK(parse_config(json::parse(j.dump())) == doc);
    for (const auto& s : doc.scenarios) CHECK_NOTHROW(build(s));
  }
  try {
    figure("fig7");
    FAIL("unknown id accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("fig11") != std::string::npos);
  }
}

TEST_CASE("preset contents follow the captions") {
  const auto fig3 = figure("fig3");
  REQUIRE(fig3.scenarios.size() == 6);
  const auto& p = fig3.scenarios[0].populations[0];
  CHECK(p.matrix.rsp_a == 1.0);
  CHECK(p.matrix.rsp_b == 2.0);
  CHECK(p.x0 == std::vector<double>{0.125, 0.125, 0.75});
  CHECK(p.incentive.kind == "q_replicator");

  const auto fig8 = figure("fig8").scenarios.at(0);
  REQUIRE(fig8.populations.size() == 2);
  CHECK(fig8.populations[0].incentive.kind == "replicator");
  CHECK(fig8.populations[0].geometry.kind == "shahshahani");
  CHECK(fig8.populations[0].timescale.h == 0.1);
  CHECK(fig8.populations[0].x0 == std::vector<double>{0.2, 0.2, 0.6});
  CHECK(fig8.populations[1].incentive.kind == "logit");
  CHECK(fig8.populations[1].incentive.eta == 0.4);
  CHECK(fig8.populations[1].geometry.kind == "euclidean");
  CHECK(fig8.populations[1].x0 == std::vector<double>{0.6, 0.2, 0.2});

  const auto brfp = figure("brfp");
  REQUIRE(brfp.scenarios.size() == 2);
  CHECK(brfp.scenarios[0].populations[0].timescale.h == 1.0 / 3.0);
  CHECK(brfp.scenarios[1].populations[0].timescale.kind == "harmonic");
}

TEST_CASE("trajectory and divergence CSVs") {
  const fs::path dir = scratch("csv");
  RunOptions opts;
  opts.output_dir = dir.string();
  const ScenarioConfig s = parse_config(small_scenario()).scenarios[0];
  const ScenarioResult r = run_scenario(s, opts);
  CHECK(r.files.size() == 2);
  const std::string traj = slurp(dir / "small.pop0.csv");
  CHECK(first_line(traj) == "pop,step,t,x_0,x_1,x_2");
  CHECK(std::count(traj.begin(), traj.end(), '\n') == 52);
  const std::string second = traj.substr(traj.find('\n') + 1);
  CHECK(first_line(second) ==
        "0,0,0.0000000000000000e+00,1.0000000000000001e-01,1.0000000000000001e-01,"
        "8.0000000000000004e-01");
  const std::string div = slurp(dir / "small.divergence.csv");
  CHECK(first_line(div) == "pop,step,t,divergence_name,value");
  CHECK(div.find(",kl,") != std::string::npos);
  CHECK(div.find(",q2_divergence,") != std::string::npos);
  CHECK(std::count(div.begin(), div.end(), '\n') == 1 + 2 * 51);

  // Byte-identical on a second run.
  const fs::path again = scratch("csv2");
  opts.output_dir = again.string();
  run_scenario(s, opts);
  CHECK(slurp(again / "small.pop0.csv") == traj);
  CHECK(slurp(again / "small.divergence.csv") == div);
}

TEST_CASE("combined rows for several populations") {
  ScenarioConfig s = figure("fig10").scenarios[0];
  s.steps = 20;
  RunOptions opts;
  opts.write_files = false;
  const ScenarioResult r = run_scenario(s, opts);
  REQUIRE(r.combined.size() == 1);
  CHECK(r.combined[0].first == "L_escort_divergence");
  CHECK(r.combined[0].second.values.size() == 11);
  const std::string div = divergence_csv(r);
  CHECK(div.find("all,2,") != std::string::npos);
}

TEST_CASE("scan") {
  ScenarioConfig s = figure("fig2").scenarios[1];
  const auto pts = scan_scenario(s, Predicate::kIss, 2);
  CHECK(pts.size() == 3);
  const std::string csv = scan_csv(pts);
  CHECK(first_line(csv) == "x1,x2,x3,value");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK_THROWS_AS(scan_scenario(s, Predicate::kIss, 2, 3), ConfigError);

  // q = 1 single-signed, q = 2.5 mixed.
  auto signs = [](const std::vector<ScanPoint>& v) {
    int pos = 0, neg = 0;
    for (const auto& p : v) {
      pos += p.value > 0;
      neg += p.value < 0;
    }
    return std::pair{pos, neg};
  };
  const auto [p1, n1] = signs(scan_scenario(figure("fig2").scenarios[1], Predicate::kIss, 30));
  CHECK((p1 == 0 || n1 == 0));
  const auto [p25, n25] = signs(scan_scenario(figure("fig2").scenarios[2], Predicate::kIss, 30));
  CHECK(p25 > 0);
  CHECK(n25 > 0);
}

TEST_CASE("check report") {
  json j = small_scenario();
  j["populations"][0]["x0"] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const ScenarioConfig s = parse_config(j).scenarios[0];
  RunOptions opts;
  opts.write_files = false;
  const auto lines = check_report(s, run_scenario(s, opts), opts);
  CHECK(find_key(lines, "small.pop0.converged") == "true");
  CHECK(find_key(lines, "small.pop0.converged_step") == "0");
  CHECK(find_key(lines, "small.converged") == "true");
  CHECK(find_key(lines, "small.pop0.kl") == "monotone_decreasing");
  CHECK(find_key(lines, "small.pop0.q2_divergence") == "monotone_decreasing");
  CHECK(find_key(lines, "small.pop0.iss.fraction_satisfied") != "<missing>");
  CHECK(find_key(lines, "small.pop0.classify.payoff_monotone") != "<missing>");
}

TEST_CASE("run_document keeps order and parallel results match serial ones") {
  ConfigDocument doc = figure("fig5");
  for (auto& s : doc.scenarios) s.steps = 200;
  RunOptions opts;
  opts.write_files = false;
  opts.threads = 3;
  const auto par = run_document(doc, opts);
  opts.threads = 1;
  const auto ser = run_document(doc, opts);
  REQUIRE(par.size() == doc.scenarios.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].name == doc.scenarios[i].name);
    CHECK(par[i].populations[0].trajectory.final_state() ==
          ser[i].populations[0].trajectory.final_state());
  }
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("tool");
  write_json(dir / "ok.json", small_scenario());
  json bad = small_scenario();
  bad["steps"] = 0;
  write_json(dir / "bad.json", bad);
  json runaway = small_scenario();
  runaway["populations"][0]["incentive"] = {{"kind", "q_replicator"}, {"q", 0.5}};
  runaway["populations"][0]["geometry"] = "euclidean";
  runaway["populations"][0]["timescale"] = {{"kind", "uniform"}, {"h", 0.5}};
  runaway["steps"] = 200;
  write_json(dir / "runaway.json", runaway);
  const std::string out = "--output-dir " + (dir / "out").string() + " ";

  CHECK(tool(out + "run " + (dir / "ok.json").string()) == 0);
  CHECK(fs::exists(dir / "out" / "small.pop0.csv"));
  CHECK(tool(out + "run " + (dir / "bad.json").string()) == 2);
  CHECK(tool(out + "run " + (dir / "missing.json").string()) == 2);
  CHECK(tool(out + "run " + (dir / "runaway.json").string()) == 3);
  CHECK(tool(out + "check " + (dir / "ok.json").string()) == 0);
  CHECK(tool(out + "scan " + (dir / "ok.json").string() + " --predicate giss --resolution 4") == 0);
  CHECK(fs::exists(dir / "out" / "small.scan.giss.csv"));
  CHECK(tool("figure fig8") == 0);
  CHECK(tool("figure nope") == 2);
  CHECK(tool("frobnicate") == 2);
}
