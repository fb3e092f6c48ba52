#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "hysterix/scenario.hpp"

using namespace hysterix;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("hysterix_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("each scenario kind runs green at desk scale") {
  CHECK(run_scenario_text(R"({"kind":"stop","seed":3,
    "grid":{"T":2,"n":60,"jitter":0.3},
    "signal":{"type":"random","amp":1.3},"samples":20})", "") == 0);

  CHECK(run_scenario_text(R"({"kind":"derivative","seed":4,
    "grid":{"T":2,"n":80},
    "signal":{"type":"random-walk","level":0,"step":0.5},
    "direction":{"type":"random","amp":1}})", "") == 0);

  CHECK(run_scenario_text(R"({"kind":"counterexample","n_list":[1,2,4]})", "") == 0);

  CHECK(run_scenario_text(R"({"kind":"ks-selftest","seed":5,"samples":25,"depth":9})", "") == 0);

  CHECK(run_scenario_text(R"({"kind":"optimize","seed":6,
    "grid":{"T":2,"n":40},"config":{"r":1,"y0":0},
    "objective":{"w_term":1,"y_T":0.4,"nu":0.001},
    "solver":{"direction_count":60}})", "") == 0);
}

TEST_CASE("a non-stationary control fails the stationarity scenario") {
  int code = run_scenario_text(R"({"kind":"stationarity","seed":7,
    "grid":{"T":2,"n":30},
    "signal":{"type":"constant","level":0},
    "objective":{"w_term":1,"y_T":0.5,"nu":0.001}})", "");
  CHECK(code == 2);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    run_scenario_text("{\"kind\": \"stop\",\n  \"grid\": {,}\n}", "");
    FAIL("expected a scenario error");
  } catch (const ScenarioError& e) {
    std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
  }
}

TEST_CASE("schema errors carry the json path") {
  auto expect_path = [](const std::string& text, const std::string& needle) {
    try {
      run_scenario_text(text, "");
      FAIL("expected a scenario error for ", text);
    } catch (const ScenarioError& e) {
      std::string msg = e.what();
      INFO(msg);
      CHECK(msg.find(needle) != std::string::npos);
    }
  };
  expect_path(R"({"kind":"nope"})", "$.kind");
  expect_path(R"({"kind":"stop","seed":1,"grid":{"T":2,"n":10},
                  "signal":{"type":"sin"},"tolarence":1})", "$.tolarence");
  expect_path(R"({"kind":"stop","seed":1,"grid":{"T":-2,"n":10},
                  "signal":{"type":"sin"}})", "$.grid.T");
  expect_path(R"({"kind":"stop","seed":1,"grid":{"T":2,"n":10},
                  "signal":{"type":"values","values":[0,1]}})", "$.signal.values");
  expect_path(R"({"kind":"stop","grid":{"T":2,"n":10},
                  "signal":{"type":"random"}})", "$.seed");
  expect_path(R"({"kind":"optimize","seed":1,"grid":{"T":2,"n":10},
                  "objective":{"w_track":1,"nu":0.001}})", "y_d");
  expect_path(R"({"kind":"stop","seed":1,"grid":{"T":2,"n":10},
                  "signal":{"type":"sin","amp":"big"}})", "$.signal.amp");
}

TEST_CASE("missing files and garbage seeds are reported") {
  CHECK_THROWS_AS(run_scenario_file("/nonexistent/path.json", ""), ScenarioError);
  ::setenv("HYSTERIX_SEED", "not-a-number", 1);
  CHECK_THROWS_AS(effective_seed(1), ScenarioError);
  ::setenv("HYSTERIX_SEED", "99", 1);
  CHECK(effective_seed(1) == 99);
  ::unsetenv("HYSTERIX_SEED");
  CHECK(effective_seed(1) == 1);
}

TEST_CASE("outputs are written, well-formed, and reproducible") {
  TempDir d1, d2;
  const std::string sc = R"({"kind":"stop","seed":11,
    "grid":{"T":1.5,"n":40,"jitter":0.25},
    "signal":{"type":"random","amp":1.1},"samples":12})";
  REQUIRE(run_scenario_text(sc, d1.path.string()) == 0);
  REQUIRE(run_scenario_text(sc, d2.path.string()) == 0);

  std::string rj = slurp(d1.path / "result.json");
  CHECK(rj == slurp(d2.path / "result.json"));
  std::string cs = slurp(d1.path / "series.csv");
  CHECK(cs == slurp(d2.path / "series.csv"));

  nlohmann::json r = nlohmann::json::parse(rj);
  CHECK(r["pass"].get<bool>());
  CHECK(r["kind"] == "stop");
  CHECK(r["seed"] == 11);
  CHECK(r["checks"].is_array());
  for (const auto& c : r["checks"]) {
    CHECK(c.contains("name"));
    CHECK(c.contains("value"));
    CHECK(c.contains("threshold"));
    CHECK(c["pass"].get<bool>());
  }
  CHECK(r["columns"].contains("y"));

  // csv: fixed header, one row per solution node, y and u filled, eta/p empty
  std::istringstream lines(cs);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "t,y,u,eta,p");
  std::size_t rows = 0;
  double prev_t = -1.0;
  while (std::getline(lines, line)) {
    ++rows;
    std::size_t c1 = line.find(','), c2 = line.find(',', c1 + 1);
    double t = std::stod(line.substr(0, c1));
    CHECK(t > prev_t);
    prev_t = t;
    CHECK(c2 > c1 + 1);                           // y present
    CHECK(line.substr(line.size() - 2) == ",,");  // eta and p absent
  }
  CHECK(rows >= 41);
}

TEST_CASE("seed override changes the drawn data") {
  TempDir d1, d2;
  const std::string sc = R"({"kind":"stop","seed":11,
    "grid":{"T":1.5,"n":30,"jitter":0.25},
    "signal":{"type":"random","amp":1.1},"samples":8})";
  REQUIRE(run_scenario_text(sc, d1.path.string()) == 0);
  ::setenv("HYSTERIX_SEED", "1234", 1);
  int code = run_scenario_text(sc, d2.path.string());
  ::unsetenv("HYSTERIX_SEED");
  REQUIRE(code == 0);
  CHECK(slurp(d1.path / "series.csv") != slurp(d2.path / "series.csv"));
  nlohmann::json r = nlohmann::json::parse(slurp(d2.path / "result.json"));
  CHECK(r["seed"] == 1234);
}

TEST_CASE("stationarity scenario emits the full report") {
  TempDir d;
  // solve first, then feed the solution back via explicit node values
  const std::string opt = R"({"kind":"optimize","seed":21,
    "grid":{"T":2,"n":30},
    "objective":{"w_term":1,"y_T":0.35,"nu":0.002},
    "solver":{"direction_count":40}})";
  REQUIRE(run_scenario_text(opt, d.path.string()) == 0);
  nlohmann::json r = nlohmann::json::parse(slurp(d.path / "result.json"));
  REQUIRE(r.contains("report"));
  CHECK(r["report"]["pass"].get<bool>());
  CHECK(r["report"]["lines"].size() == 5);
  CHECK(r.contains("objective_trace"));
  CHECK(r["max_trace_uptick"].get<double>() <= 1e-10);

  nlohmann::json u_star = r["u_star"];
  nlohmann::json sc{{"kind", "stationarity"},
                    {"seed", 22},
                    {"grid", {{"T", 2}, {"n", 30}}},
                    {"signal", {{"type", "values"}, {"values", u_star}}},
                    {"objective", {{"w_term", 1}, {"y_T", 0.35}, {"nu", 0.002}}}};
  TempDir d2;
  CHECK(run_scenario_text(sc.dump(), d2.path.string()) == 0);
  nlohmann::json r2 = nlohmann::json::parse(slurp(d2.path / "result.json"));
  CHECK(r2["report"]["pass"].get<bool>());
  // the series now carries the adjoint column
  std::string cs = slurp(d2.path / "series.csv");
  std::istringstream lines(cs);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  CHECK(line.substr(line.size() - 1) != ",");  // p column filled
}
