// Command line front end. Every subcommand except selftest builds a scenario
// document and hands it to the same runner the `run` subcommand uses, so the
// CLI and scenario files cannot drift apart.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hysterix/scenario.hpp"

namespace {

using nlohmann::json;

struct GridFlags {
  double T = 6.0;
  long long n = 200;
  double jitter = 0.0;
};

struct ConfigFlags {
  double r = 1.0;
  double y0 = 0.0;
};

struct SignalFlags {
  std::string type = "sin";
  double amp = 1.0;
  double level = 0.0;
  double step = 0.5;
  double rate = 1.0;
};

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
  cmd->add_option("--T", g.T, "final time")->check(CLI::PositiveNumber);
  cmd->add_option("--grid-n", g.n, "number of grid cells")->check(CLI::Range(1LL, 2000000LL));
  cmd->add_option("--jitter", g.jitter, "random node jitter in [0,1) (0 = uniform grid)")
      ->check(CLI::Range(0.0, 0.999999));
}

void add_config_flags(CLI::App* cmd, ConfigFlags& c) {
  cmd->add_option("--r", c.r, "half width of the hysteresis band")->check(CLI::PositiveNumber);
  cmd->add_option("--y0", c.y0, "initial state (|y0| <= r)");
}

void add_signal_flags(CLI::App* cmd, SignalFlags& s, const char* prefix, const char* what) {
  std::string p(prefix);
  cmd->add_option("--" + p + "signal", s.type,
                  std::string(what) + " shape: sin, constant, random, random-walk, bump");
  cmd->add_option("--" + p + "amp", s.amp, std::string(what) + " amplitude");
  cmd->add_option("--" + p + "level", s.level, std::string(what) + " constant level / walk start");
  cmd->add_option("--" + p + "step", s.step, std::string(what) + " walk step size");
  cmd->add_option("--" + p + "rate", s.rate, std::string(what) + " bump time scaling");
}

json grid_json(const GridFlags& g) {
  return {{"T", g.T}, {"n", g.n}, {"jitter", g.jitter}};
}

json config_json(const ConfigFlags& c) { return {{"r", c.r}, {"y0", c.y0}}; }

json signal_json(const SignalFlags& s) {
  return {{"type", s.type}, {"amp", s.amp},   {"level", s.level},
          {"step", s.step}, {"rate", s.rate}};
}

int dispatch(const json& scenario, const std::string& out_dir) {
  int code = hysterix::run_scenario_text(scenario.dump(), out_dir);
  if (code == 0) {
    std::printf("all checks passed\n");
  } else {
    std::printf("one or more checks FAILED\n");
  }
  if (!out_dir.empty()) std::printf("wrote %s/result.json and %s/series.csv\n",
                                    out_dir.c_str(), out_dir.c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hysterix: scalar stop operator, its directional derivatives, and "
               "stationarity checks for rate-independent tracking control"};
  app.require_subcommand(1);

  // shared state, one copy per subcommand would be noise at this size
  std::string scenario_path, out_dir;
  GridFlags grid;
  ConfigFlags config;
  SignalFlags signal, direction, yd;
  direction.type = "random";
  yd.type = "constant";
  double tol = -1.0;  // per-kind default when negative
  long long seed = 1, samples = -1;

  auto* run = app.add_subcommand("run", "execute a scenario file");
  run->add_option("scenario", scenario_path, "path to a scenario JSON document")->required();
  run->add_option("--out", out_dir, "directory for result.json and series.csv");

  auto* stop_eval = app.add_subcommand("stop-eval", "evolve the stop operator on a signal");
  add_grid_flags(stop_eval, grid);
  add_config_flags(stop_eval, config);
  add_signal_flags(stop_eval, signal, "", "input");
  stop_eval->add_option("--samples", samples, "number of test functions in the inequality check");
  stop_eval->add_option("--tol", tol, "check tolerance");
  stop_eval->add_option("--seed", seed, "random seed")->check(CLI::NonNegativeNumber);
  stop_eval->add_option("--out", out_dir, "directory for result.json and series.csv");

  auto* deriv = app.add_subcommand("derivative",
                                   "directional derivative with a finite difference cross check");
  add_grid_flags(deriv, grid);
  add_config_flags(deriv, config);
  add_signal_flags(deriv, signal, "", "input");
  add_signal_flags(deriv, direction, "dir-", "direction");
  deriv->add_option("--tol", tol, "check tolerance");
  deriv->add_option("--seed", seed, "random seed")->check(CLI::NonNegativeNumber);
  deriv->add_option("--out", out_dir, "directory for result.json and series.csv");

  double nu = 1e-3, w_term = 1.0, w_track = 0.0, y_T = 0.0;
  auto add_objective_flags = [&](CLI::App* cmd) {
    cmd->add_option("--nu", nu, "control cost weight")->check(CLI::PositiveNumber);
    cmd->add_option("--w-term", w_term, "terminal tracking weight")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--w-track", w_track, "trajectory tracking weight")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--y-T", y_T, "terminal target");
    add_signal_flags(cmd, yd, "yd-", "tracking target");
  };
  auto objective_json = [&]() {
    json o{{"nu", nu}, {"w_term", w_term}, {"w_track", w_track}, {"y_T", y_T}};
    if (w_track > 0.0) o["y_d"] = signal_json(yd);
    return o;
  };

  auto* station = app.add_subcommand("check-stationarity",
                                     "test the stationarity system at a given control");
  add_grid_flags(station, grid);
  add_config_flags(station, config);
  add_signal_flags(station, signal, "", "control");
  add_objective_flags(station);
  station->add_option("--samples", samples, "number of sampled test directions");
  station->add_option("--tol", tol, "relative tolerance per condition");
  station->add_option("--seed", seed, "random seed")->check(CLI::NonNegativeNumber);
  station->add_option("--out", out_dir, "directory for result.json and series.csv");

  long long max_iters = 300, dir_count = 200;
  bool no_polish = false, no_check = false;
  double lower = 0.0, upper = 0.0;
  auto* opt = app.add_subcommand("optimize", "solve the tracking control problem");
  add_grid_flags(opt, grid);
  add_config_flags(opt, config);
  add_objective_flags(opt);
  opt->add_option("--max-iters", max_iters, "iterations per smoothing stage")
      ->check(CLI::PositiveNumber);
  opt->add_option("--directions", dir_count, "sampled directions for the descent check")
      ->check(CLI::PositiveNumber);
  opt->add_flag("--no-polish", no_polish, "skip the exact corrector stage");
  opt->add_flag("--no-check", no_check, "skip the stationarity system check");
  auto* lower_opt = opt->add_option("--lower", lower, "constant lower control bound");
  auto* upper_opt = opt->add_option("--upper", upper, "constant upper control bound");
  opt->add_option("--tol", tol, "check tolerance");
  opt->add_option("--seed", seed, "random seed")->check(CLI::NonNegativeNumber);
  opt->add_option("--out", out_dir, "directory for result.json and series.csv");

  std::vector<long long> n_list;
  auto* demo = app.add_subcommand("demo-counterexample",
                                  "uniformly bounded variation inputs whose outputs do not "
                                  "converge in variation norm");
  demo->add_option("--n-list", n_list, "frequency parameters (positive integers)");
  demo->add_option("--tol", tol, "check tolerance");
  demo->add_option("--out", out_dir, "directory for result.json and series.csv");

  auto* self = app.add_subcommand("selftest", "fast built-in consistency checks");
  self->add_option("--grid-n", grid.n, "number of grid cells")->check(CLI::Range(1LL, 2000000LL));
  self->add_option("--samples", samples, "sample count for the integrator check");
  self->add_option("--seed", seed, "random seed")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion")
      return app.exit(e);
    app.exit(e);
    return 1;
  }

  try {
    if (run->parsed()) {
      int code = hysterix::run_scenario_file(scenario_path, out_dir);
      std::printf(code == 0 ? "all checks passed\n" : "one or more checks FAILED\n");
      return code;
    }
    if (stop_eval->parsed()) {
      json sc{{"kind", "stop"},   {"seed", seed},
              {"grid", grid_json(grid)},   {"config", config_json(config)},
              {"signal", signal_json(signal)}};
      if (samples > 0) sc["samples"] = samples;
      if (tol > 0) sc["tolerance"] = tol;
      return dispatch(sc, out_dir);
    }
    if (deriv->parsed()) {
      json sc{{"kind", "derivative"}, {"seed", seed},
              {"grid", grid_json(grid)},     {"config", config_json(config)},
              {"signal", signal_json(signal)}, {"direction", signal_json(direction)}};
      if (tol > 0) sc["tolerance"] = tol;
      return dispatch(sc, out_dir);
    }
    if (station->parsed()) {
      json sc{{"kind", "stationarity"}, {"seed", seed},
              {"grid", grid_json(grid)},       {"config", config_json(config)},
              {"signal", signal_json(signal)}, {"objective", objective_json()}};
      if (samples > 0) sc["samples"] = samples;
      if (tol > 0) sc["tolerance"] = tol;
      return dispatch(sc, out_dir);
    }
    if (opt->parsed()) {
      json sc{{"kind", "optimize"}, {"seed", seed},
              {"grid", grid_json(grid)},   {"config", config_json(config)},
              {"objective", objective_json()}};
      json solver{{"max_iters", max_iters},
                  {"direction_count", dir_count},
                  {"polish", !no_polish},
                  {"check", !no_check}};
      sc["solver"] = solver;
      if (lower_opt->count() || upper_opt->count()) {
        if (!lower_opt->count() || !upper_opt->count())
          throw hysterix::ScenarioError("--lower and --upper must be given together");
        sc["box"] = json{{"lower", lower}, {"upper", upper}};
      }
      if (tol > 0) sc["tolerance"] = tol;
      return dispatch(sc, out_dir);
    }
    if (demo->parsed()) {
      json sc{{"kind", "counterexample"}};
      if (!n_list.empty()) sc["n_list"] = n_list;
      if (tol > 0) sc["tolerance"] = tol;
      return dispatch(sc, out_dir);
    }
    // selftest: three small scenarios through the same runner
    long long ks_samples = samples > 0 ? samples : 40;
    json parts = json::array();
    parts.push_back(json{{"kind", "ks-selftest"}, {"seed", seed}, {"samples", ks_samples}});
    parts.push_back(json{{"kind", "stop"},
                         {"seed", seed},
                         {"grid", {{"T", 6.0}, {"n", grid.n}, {"jitter", 0.2}}},
                         {"signal", {{"type", "random"}, {"amp", 1.4}}},
                         {"samples", 24}});
    parts.push_back(json{{"kind", "derivative"},
                         {"seed", seed + 1},
                         {"grid", {{"T", 4.0}, {"n", grid.n}, {"jitter", 0.0}}},
                         {"signal", {{"type", "sin"}, {"amp", 1.3}}},
                         {"direction", {{"type", "random"}, {"amp", 1.0}}}});
    int worst = 0;
    for (const json& sc : parts) {
      int code = hysterix::run_scenario_text(sc.dump(), "");
      std::printf("%-12s %s\n", sc["kind"].get<std::string>().c_str(),
                  code == 0 ? "ok" : "FAILED");
      worst = std::max(worst, code);
    }
    return worst;
  } catch (const hysterix::ScenarioError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
}
