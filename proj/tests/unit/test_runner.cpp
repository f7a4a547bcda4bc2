#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cmix/errors.hpp"
#include "cmix/matrix_io.hpp"
#include "cmix/random.hpp"
#include "cmix/runner.hpp"

using namespace cmix;
using nlohmann::json;
namespace rn = cmix::runner;

namespace {

json config_with(json scenarios) {
  return {{"schema", "cmix.config"}, {"version", 1}, {"seed", 7}, {"scenarios", std::move(scenarios)}};
}

json random_scenario(const std::string& name, json tasks) {
  return {{"name", name}, {"model", {{"model", "random"}, {"kind", "discrete"}, {"dim", 16}}},
          {"tasks", std::move(tasks)}, {"seed", 7}};
}

std::string parse_error(const json& j) {
  try {
    rn::parse_config(j);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

rn::RunOptions in_memory() {
  rn::RunOptions o;
  o.write_files = false;
  return o;
}

const json& task_entry(const json& report, const std::string& scenario, const std::string& task) {
  for (const json& s : report.at("scenarios")) {
    if (s.at("name") != scenario) continue;
    for (const json& t : s.at("tasks")) {
      if (t.at("task") == task) return t;
    }
  }
  throw std::runtime_error("missing task " + scenario + "/" + task);
}

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("schema violations name the offending field") {
  CHECK(parse_error(config_with(json::array({random_scenario("a", json::array())}))).find("/scenarios/0/tasks") != std::string::npos);
  CHECK(parse_error(config_with(json::array({random_scenario("a", {"admissibility"})}))).find("/scenarios/0/tasks/0") != std::string::npos);
  CHECK(parse_error(config_with(json::array({random_scenario("a", {"degree", "degree"})}))).find("listed twice") != std::string::npos);
  CHECK(parse_error(config_with(json::array({random_scenario("a", {"degree"}), random_scenario("a", {"degree"})}))).find("duplicate") != std::string::npos);
  json sched = random_scenario("a", {"degree"});
  sched["schedule"] = {1, 5, 5};
  CHECK(parse_error(config_with(json::array({sched}))).find("/scenarios/0/schedule/2") != std::string::npos);
  sched["schedule"] = {1, 2.5};
  CHECK(parse_error(config_with(json::array({sched}))).find("integers") != std::string::npos);
  json extra = random_scenario("a", {"degree"});
  extra["colour"] = "red";
  CHECK(parse_error(config_with(json::array({extra}))).find("/scenarios/0/colour") != std::string::npos);
  json model_extra = random_scenario("a", {"degree"});
  model_extra["model"]["dimm"] = 3;
  CHECK(parse_error(config_with(json::array({model_extra}))).find("/model/dimm") != std::string::npos);
  json bad_dim = random_scenario("a", {"degree"});
  bad_dim["model"]["dim"] = "sixteen";
  CHECK(parse_error(config_with(json::array({bad_dim}))).find("/model/dim") != std::string::npos);
  json v2 = config_with(json::array({random_scenario("a", {"degree"})}));
  v2["version"] = 2;
  CHECK(parse_error(v2).find("/version") != std::string::npos);
  json th = config_with(json::array({random_scenario("a", {"degree"})}));
  th["thresholds"] = {{"identity_rell", 1.0}};
  CHECK(parse_error(th).find("/thresholds/identity_rell") != std::string::npos);
  CHECK(parse_error(config_with(json::array())).find("/scenarios") != std::string::npos);
  json torus = {{"name", "t"}, {"model", {{"model", "torus"}, {"y", {1.5}}, {"B", {{2}}}, {"q", {3}}}}, {"tasks", {"degree"}}};
  CHECK(parse_error(config_with(json::array({torus}))).find("/scenarios/0/model") != std::string::npos);
  CHECK_THROWS_AS(rn::load_config("/nonexistent/config.json"), ParseError);
}

TEST_CASE("thresholds round-trip and override") {
  rn::Thresholds t;
  const rn::Thresholds back = rn::thresholds_from_json(rn::to_json(t));
  CHECK(rn::to_json(back) == rn::to_json(t));
  const rn::Thresholds o = rn::thresholds_from_json({{"su2_rel", 0.5}});
  CHECK(o.su2_rel == 0.5);
  CHECK(o.identity_rel == t.identity_rel);
}

TEST_CASE("random dim-16 identities pass at the documented bound") {
  const rn::Config cfg = rn::parse_config(config_with(json::array({random_scenario("ids", {"identities"})})));
  const rn::RunResult res = rn::run(cfg, in_memory());
  CHECK(res.status == rn::Status::pass);
  CHECK(res.failures.empty());
  const json& t = task_entry(res.report, "ids", "identities");
  CHECK(t.at("status") == "pass");
  CHECK(t.at("thresholds").at("identity_rel") == 1e-9);
  REQUIRE(t.at("metrics").at("degree_identity").size() == 5);
  const double a = t.at("metrics").at("conjugate_norm").get<double>();
  for (const json& row : t.at("metrics").at("degree_identity")) {
    const double n = row.at("n").get<double>();
    CHECK(row.at("residual").get<double>() <= 1e-9 * (1.0 + a) * (1.0 + n));
    CHECK(row.at("alternative_gap").get<double>() <= 1e-10);
  }
}

TEST_CASE("failing metric is named and drives the exit code") {
  json j = config_with(json::array({random_scenario("ids", {"identities"})}));
  j["thresholds"] = {{"identity_rel", 1e-30}};
  const rn::RunResult res = rn::run(rn::parse_config(j), in_memory());
  CHECK(res.status == rn::Status::fail);
  REQUIRE_FALSE(res.failures.empty());
  CHECK(res.failures[0].find("ids/identities") != std::string::npos);
  CHECK(res.failures[0].find("identity residual") != std::string::npos);
  CHECK(rn::exit_code(res.status, false) == 1);
  CHECK(rn::exit_code(rn::Status::warn, false) == 0);
  CHECK(rn::exit_code(rn::Status::warn, true) == 1);
  CHECK(rn::exit_code(rn::Status::pass, true) == 0);
}

TEST_CASE("torus scenario reports the closed-form limit and decay") {
  const double y = (std::sqrt(5.0) - 1.0) / 2.0;
  json sc = {{"name", "torus"},
             {"model", {{"model", "torus"}, {"y", {y}}, {"B", {{2}}}, {"q", {3}},
                        {"eta", {{{"frequency", {1}}, {"re", 0.0}, {"im", -0.025}},
                                 {{"frequency", {-1}}, {"re", 0.0}, {"im", 0.025}}}},
                        {"grid", 128}, {"horizon", 64}}},
             {"tasks", {"degree", "mixing"}},
             {"schedule", {8, 16, 32, 64, 128, 256}}};
  const rn::RunResult res = rn::run(rn::parse_config(config_with(json::array({sc}))), in_memory());
  const json& d = task_entry(res.report, "torus", "degree");
  CHECK(d.at("metrics").at("limit").get<double>() == doctest::Approx(2.0 * std::numbers::pi * y * 6.0).epsilon(1e-14));
  CHECK(d.at("status") == "pass");
  const json& m = task_entry(res.report, "torus", "mixing");
  CHECK(m.at("metrics").at("decayed").get<bool>());
  CHECK(m.at("thresholds").contains("decay_fraction"));
}

TEST_CASE("inline matrix models") {
  Rng rng(3);
  const Matrix u = random_unitary(4, rng);
  const Matrix a = random_hermitian(4, rng);
  json sc = {{"name", "m"},
             {"model", {{"model", "matrix"}, {"kind", "discrete"}, {"main", matrix_to_json(u)},
                        {"conjugate", matrix_to_json(a)}}},
             {"tasks", {"identities"}},
             {"schedule", {1, 3}}};
  const rn::RunResult res = rn::run(rn::parse_config(config_with(json::array({sc}))), in_memory());
  CHECK(res.status == rn::Status::pass);
  json bad = sc;
  bad["model"]["main"] = matrix_to_json(a);  // Hermitian, not unitary
  CHECK_THROWS_AS(rn::parse_config(config_with(json::array({bad}))), ParseError);
}

TEST_CASE("reports are deterministic and re-runnable from their echo") {
  json scenarios = json::array({random_scenario("b_ids", {"identities", "degree"}),
                                {{"name", "a_flow"},
                                 {"model", {{"model", "random"}, {"kind", "continuous"}, {"dim", 6}}},
                                 {"tasks", {"identities", "mixing", "summability"}}},
                                {{"name", "c_graph"},
                                 {"model", {{"model", "graph"}, {"family", "z"}, {"size", 30}, {"margin", 3}}},
                                 {"tasks", {"admissibility", "identities", "degree"}}}});
  const rn::Config cfg = rn::parse_config(config_with(scenarios));
  const rn::RunResult one = rn::run(cfg, in_memory());
  rn::RunOptions threaded = in_memory();
  threaded.threads = 3;
  const rn::RunResult two = rn::run(cfg, threaded);
  CHECK(rn::dump(one.report) == rn::dump(two.report));
  // ordered by name, one entry per configured task
  const json& sc = one.report.at("scenarios");
  REQUIRE(sc.size() == 3);
  CHECK(sc[0].at("name") == "a_flow");
  CHECK(sc[2].at("name") == "c_graph");
  CHECK(sc[0].at("tasks").size() == 3);
  for (const json& s : sc) {
    for (const json& t : s.at("tasks")) {
      CHECK(t.contains("thresholds"));
      CHECK(t.contains("metrics"));
    }
  }
  // the echo carries resolved seeds and full thresholds
  const rn::Config again = rn::parse_config(one.report.at("config"));
  CHECK(rn::dump(rn::run(again, in_memory()).report) == rn::dump(one.report));
  CHECK(one.metadata.contains("scenario_seconds"));
  CHECK_FALSE(one.report.contains("scenario_seconds"));
}

TEST_CASE("seed override and derivation") {
  json s = random_scenario("r", {"degree"});
  s.erase("seed");
  const rn::Config cfg = rn::parse_config(config_with(json::array({s})));
  const rn::RunResult a = rn::run(cfg, in_memory());
  rn::RunOptions o = in_memory();
  o.seed = 8;
  const rn::RunResult b = rn::run(cfg, o);
  const auto sa = a.report.at("scenarios")[0].at("seed").get<std::uint64_t>();
  const auto sb = b.report.at("scenarios")[0].at("seed").get<std::uint64_t>();
  CHECK(sa != sb);
  CHECK(b.report.at("config").at("seed") == 8);
  CHECK_FALSE(rn::compare(a.report, b.report).empty());
}

TEST_CASE("compare: empty, one-entry and version mismatch") {
  auto graph_cfg = [](json schedule) {
    json sc = {{"name", "g"},
               {"model", {{"model", "graph"}, {"family", "z"}, {"size", 20}, {"margin", 2}}},
               {"tasks", {"admissibility"}},
               {"schedule", std::move(schedule)}};
    return rn::parse_config(config_with(json::array({sc})));
  };
  const rn::RunResult a = rn::run(graph_cfg({1, 2, 3}), in_memory());
  const rn::RunResult a2 = rn::run(graph_cfg({1, 2, 3}), in_memory());
  const rn::RunResult b = rn::run(graph_cfg({1, 2, 4}), in_memory());
  CHECK(rn::compare(a.report, a2.report).empty());
  const auto diff = rn::compare(a.report, b.report);
  REQUIRE(diff.size() == 1);
  CHECK(diff[0].path == "/config/scenarios/0/schedule/2");
  CHECK(diff[0].a == 3.0);
  CHECK(diff[0].b == 4.0);
  json other = a.report;
  other["version"] = 99;
  CHECK_THROWS_AS(rn::compare(a.report, other), ArgumentError);
  CHECK_THROWS_AS(rn::compare(a.report, json{{"schema", "something"}}), ArgumentError);
  // numeric tolerance
  json near = a.report;
  near["config"]["thresholds"]["su2_rel"] = 2e-2 * (1.0 + 1e-12);
  CHECK(rn::compare(a.report, near).empty());
}

TEST_CASE("shipped example configs validate") {
  const auto ex = rn::example_configs();
  CHECK(ex.size() == 5);
  for (const auto& [name, cfg] : ex) {
    CAPTURE(name);
    CHECK_NOTHROW(rn::parse_config(cfg));
  }
}

}
