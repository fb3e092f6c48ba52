#include "hysterix/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "hysterix/control.hpp"
#include "hysterix/ksint.hpp"
#include "hysterix/signals.hpp"

namespace hysterix {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError("scenario " + where + ": " + what);
}

const json* find_field(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) fail(where + "." + it.key(), "unknown field");
  }
}

double need_num(const json& j, const char* key, const std::string& where) {
  const json* f = find_field(j, key);
  if (!f) fail(where, std::string("missing required number \"") + key + "\"");
  if (!f->is_number()) fail(where + "." + key, "must be a number");
  return f->get<double>();
}

double opt_num(const json& j, const char* key, const std::string& where, double def) {
  const json* f = find_field(j, key);
  if (!f) return def;
  if (!f->is_number()) fail(where + "." + key, "must be a number");
  return f->get<double>();
}

long long need_int(const json& j, const char* key, const std::string& where) {
  const json* f = find_field(j, key);
  if (!f) fail(where, std::string("missing required integer \"") + key + "\"");
  if (!f->is_number_integer()) fail(where + "." + key, "must be an integer");
  return f->get<long long>();
}

long long opt_int(const json& j, const char* key, const std::string& where, long long def) {
  const json* f = find_field(j, key);
  if (!f) return def;
  if (!f->is_number_integer()) fail(where + "." + key, "must be an integer");
  return f->get<long long>();
}

bool opt_bool(const json& j, const char* key, const std::string& where, bool def) {
  const json* f = find_field(j, key);
  if (!f) return def;
  if (!f->is_boolean()) fail(where + "." + key, "must be a boolean");
  return f->get<bool>();
}

std::string need_str(const json& j, const char* key, const std::string& where) {
  const json* f = find_field(j, key);
  if (!f) fail(where, std::string("missing required string \"") + key + "\"");
  if (!f->is_string()) fail(where + "." + key, "must be a string");
  return f->get<std::string>();
}

std::vector<double> opt_num_array(const json& j, const char* key, const std::string& where,
                                  std::vector<double> def) {
  const json* f = find_field(j, key);
  if (!f) return def;
  if (!f->is_array()) fail(where + "." + key, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : *f) {
    if (!e.is_number()) fail(where + "." + key, "must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

// ---- signals -------------------------------------------------------------

struct SignalSpec {
  std::string type = "sin";
  double amp = 1.0;
  double step = 0.5;
  double level = 0.0;
  double rate = 1.0;
  std::vector<double> values;
};

SignalSpec parse_signal(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "must be an object");
  check_keys(j, where, {"type", "amp", "step", "level", "rate", "values"});
  SignalSpec s;
  s.type = need_str(j, "type", where);
  if (s.type != "sin" && s.type != "constant" && s.type != "random" &&
      s.type != "random-walk" && s.type != "bump" && s.type != "values")
    fail(where + ".type",
         "must be one of sin, constant, random, random-walk, bump, values");
  s.amp = opt_num(j, "amp", where, 1.0);
  s.step = opt_num(j, "step", where, 0.5);
  s.level = opt_num(j, "level", where, 0.0);
  s.rate = opt_num(j, "rate", where, 1.0);
  if (s.type == "values") {
    s.values = opt_num_array(j, "values", where, {});
    if (s.values.size() < 2) fail(where + ".values", "needs at least two node values");
  }
  return s;
}

bool signal_uses_rng(const SignalSpec& s) {
  return s.type == "random" || s.type == "random-walk";
}

PLFunction build_signal(const SignalSpec& s, const TimeGrid& g, Rng& rng,
                        const std::string& where) {
  if (s.type == "sin") return scale(sample_sin(g), s.amp);
  if (s.type == "constant") return PLFunction::constant(g, s.level);
  if (s.type == "random") return random_pl(rng, g, s.amp);
  if (s.type == "random-walk") return random_walk_pl(rng, g, s.level, s.step);
  if (s.type == "bump") {
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = s.amp * 0.5 * bump2(s.rate * g[k]);
    return PLFunction(g, std::move(v));
  }
  if (s.values.size() != g.size())
    fail(where + ".values", "length must equal grid n + 1 = " + std::to_string(g.size()));
  return PLFunction(g, s.values);
}

// ---- common blocks -------------------------------------------------------

HysteresisConfig parse_config(const json& root, const std::string& where) {
  HysteresisConfig cfg;
  const json* c = find_field(root, "config");
  if (!c) return cfg;
  if (!c->is_object()) fail(where + ".config", "must be an object");
  check_keys(*c, where + ".config", {"r", "y0"});
  cfg.r = opt_num(*c, "r", where + ".config", 1.0);
  cfg.y0 = opt_num(*c, "y0", where + ".config", 0.0);
  if (!(cfg.r > 0.0)) fail(where + ".config.r", "must be positive");
  if (!(std::fabs(cfg.y0) <= cfg.r)) fail(where + ".config.y0", "must satisfy |y0| <= r");
  return cfg;
}

struct GridSpec {
  double T = 1.0;
  std::size_t n = 100;
  double jitter = 0.0;
};

GridSpec parse_grid(const json& root, const std::string& where) {
  const json* g = find_field(root, "grid");
  if (!g) fail(where, "missing required object \"grid\"");
  if (!g->is_object()) fail(where + ".grid", "must be an object");
  check_keys(*g, where + ".grid", {"T", "n", "jitter"});
  GridSpec s;
  s.T = need_num(*g, "T", where + ".grid");
  if (!(s.T > 0.0)) fail(where + ".grid.T", "must be positive");
  long long n = need_int(*g, "n", where + ".grid");
  if (n < 1 || n > 2000000) fail(where + ".grid.n", "must be in [1, 2000000]");
  s.n = static_cast<std::size_t>(n);
  s.jitter = opt_num(*g, "jitter", where + ".grid", 0.0);
  if (s.jitter < 0.0 || s.jitter >= 1.0) fail(where + ".grid.jitter", "must be in [0, 1)");
  return s;
}

TimeGrid build_grid(const GridSpec& s, Rng& rng) {
  if (s.jitter > 0.0) return random_grid(rng, s.T, s.n, s.jitter);
  return TimeGrid::uniform(s.T, s.n);
}

// ---- output --------------------------------------------------------------

struct Series {
  std::vector<double> t;
  std::vector<double> y, u, eta, p;  // empty vector = column not applicable
};

struct Checks {
  json arr = json::array();
  bool all = true;
  void add(const std::string& name, double value, double threshold, bool pass) {
    arr.push_back(
        {{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", pass}});
    all = all && pass;
  }
  void add_leq(const std::string& name, double value, double threshold) {
    add(name, value, threshold, value <= threshold);
  }
};

void append_num(std::string& line, double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  line += b;
}

void write_outputs(const std::string& out_dir, const json& result, const Series& s) {
  if (out_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ScenarioError("cannot create output directory " + out_dir + ": " + ec.message());

  {
    std::string path = out_dir + "/result.json";
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw ScenarioError("cannot open " + path + " for writing");
    std::string text = result.dump(2);
    text += "\n";
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
  }
  {
    std::string path = out_dir + "/series.csv";
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw ScenarioError("cannot open " + path + " for writing");
    std::string text = "t,y,u,eta,p\n";
    for (std::size_t k = 0; k < s.t.size(); ++k) {
      std::string line;
      append_num(line, s.t[k]);
      line += ',';
      if (!s.y.empty()) append_num(line, s.y[k]);
      line += ',';
      if (!s.u.empty()) append_num(line, s.u[k]);
      line += ',';
      if (!s.eta.empty()) append_num(line, s.eta[k]);
      line += ',';
      if (!s.p.empty()) append_num(line, s.p[k]);
      line += '\n';
      text += line;
    }
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
  }
}

json column_units() {
  return {{"t", "time"},
          {"y", "state (same units as the band)"},
          {"u", "control"},
          {"eta", "state directional derivative"},
          {"p", "adjoint"}};
}

// ---- objective / solver blocks --------------------------------------------

TrackingObjective parse_objective(const json& root, const TimeGrid& g, Rng& rng,
                                  const std::string& where, bool* uses_rng) {
  const json* o = find_field(root, "objective");
  if (!o) fail(where, "missing required object \"objective\"");
  if (!o->is_object()) fail(where + ".objective", "must be an object");
  const std::string w = where + ".objective";
  check_keys(*o, w, {"w_track", "w_term", "y_T", "nu", "y_d"});
  TrackingObjective obj;
  obj.w_track = opt_num(*o, "w_track", w, 0.0);
  obj.w_term = opt_num(*o, "w_term", w, 1.0);
  obj.y_T = opt_num(*o, "y_T", w, 0.0);
  obj.nu = opt_num(*o, "nu", w, 1e-3);
  if (obj.w_track < 0.0) fail(w + ".w_track", "must be nonnegative");
  if (obj.w_term < 0.0) fail(w + ".w_term", "must be nonnegative");
  if (!(obj.nu > 0.0)) fail(w + ".nu", "must be positive");
  if (obj.w_track > 0.0) {
    const json* yd = find_field(*o, "y_d");
    if (!yd) fail(w, "tracking weight needs \"y_d\"");
    SignalSpec s = parse_signal(*yd, w + ".y_d");
    if (signal_uses_rng(s)) *uses_rng = true;
    obj.y_d = build_signal(s, g, rng, w + ".y_d");
  }
  return obj;
}

SolveOptions parse_solver(const json& root, const std::string& where) {
  SolveOptions opts;
  const json* s = find_field(root, "solver");
  if (!s) return opts;
  if (!s->is_object()) fail(where + ".solver", "must be an object");
  const std::string w = where + ".solver";
  check_keys(*s, w, {"max_iters", "sigmas", "direction_count", "polish", "check", "grad_tol"});
  opts.max_iters = static_cast<int>(opt_int(*s, "max_iters", w, opts.max_iters));
  if (opts.max_iters < 1) fail(w + ".max_iters", "must be at least 1");
  std::vector<double> sg = opt_num_array(*s, "sigmas", w, opts.sigmas);
  for (double v : sg)
    if (!(v > 0.0)) fail(w + ".sigmas", "entries must be positive");
  opts.sigmas = sg;
  opts.direction_count = static_cast<int>(opt_int(*s, "direction_count", w, opts.direction_count));
  if (opts.direction_count < 1) fail(w + ".direction_count", "must be at least 1");
  opts.polish = opt_bool(*s, "polish", w, opts.polish);
  opts.check = opt_bool(*s, "check", w, opts.check);
  opts.grad_tol = opt_num(*s, "grad_tol", w, opts.grad_tol);
  return opts;
}

// ---- kind runners ----------------------------------------------------------

int run_stop(const json& root, unsigned long long seed, const std::string& out_dir) {
  HysteresisConfig cfg = parse_config(root, "$");
  GridSpec gs = parse_grid(root, "$");
  const json* sig = find_field(root, "signal");
  if (!sig) fail("$", "missing required object \"signal\"");
  SignalSpec ss = parse_signal(*sig, "$.signal");
  double tol = opt_num(root, "tolerance", "$", 1e-9);
  long long samples = opt_int(root, "samples", "$", 50);
  if (samples < 1) fail("$.samples", "must be at least 1");

  Rng rng(seed);
  TimeGrid g = build_grid(gs, rng);
  PLFunction u = build_signal(ss, g, rng, "$.signal");
  StopSolution sol = stop(u, cfg);

  Checks ck;
  ck.add_leq("band overshoot max(|y| - r)", std::max(0.0, sol.y.sup_norm() - cfg.r), tol);

  std::vector<GridRegulated> fams;
  fams.push_back(GridRegulated::constant(sol.grid(), 0.0));
  fams.push_back(GridRegulated::constant(sol.grid(), cfg.r));
  fams.push_back(GridRegulated::constant(sol.grid(), -cfg.r));
  for (long long i = 3; i < samples; ++i) {
    PLFunction v = random_pl(rng, sol.grid(), cfg.r);
    std::vector<double> vv = v.values();
    for (double& x : vv) x = std::clamp(x, -cfg.r, cfg.r);
    fams.push_back(GridRegulated::from_pl(PLFunction(sol.grid(), std::move(vv))));
  }
  VIResidual vi = vi_residual(sol, fams, 0.0, g.duration(), cfg);
  ck.add("variational inequality min over family", vi.min_value, -tol, vi.min_value >= -tol);

  Series se;
  const TimeGrid& og = sol.grid();
  for (std::size_t k = 0; k < og.size(); ++k) {
    se.t.push_back(og[k]);
    se.y.push_back(sol.y.value(k));
    se.u.push_back(u.eval(og[k]));
  }
  json result{{"kind", "stop"},
              {"seed", seed},
              {"checks", ck.arr},
              {"pass", ck.all},
              {"columns", column_units()},
              {"state_variation", sol.y.total_variation()},
              {"input_variation", u.total_variation()}};
  write_outputs(out_dir, result, se);
  return ck.all ? 0 : 2;
}

int run_derivative(const json& root, unsigned long long seed, const std::string& out_dir) {
  HysteresisConfig cfg = parse_config(root, "$");
  GridSpec gs = parse_grid(root, "$");
  const json* sig = find_field(root, "signal");
  if (!sig) fail("$", "missing required object \"signal\"");
  const json* dirj = find_field(root, "direction");
  if (!dirj) fail("$", "missing required object \"direction\"");
  SignalSpec ss = parse_signal(*sig, "$.signal");
  SignalSpec ds = parse_signal(*dirj, "$.direction");
  double tol = opt_num(root, "tolerance", "$", 1e-3);
  std::vector<double> alphas = opt_num_array(root, "alphas", "$",
                                             {1e-6, 2e-6, 5e-6, 1e-5, 5e-5, 1e-4, 5e-4});
  for (double a : alphas)
    if (!(a > 0.0)) fail("$.alphas", "entries must be positive");

  Rng rng(seed);
  TimeGrid g = build_grid(gs, rng);
  PLFunction u = build_signal(ss, g, rng, "$.signal");
  PLFunction h = build_signal(ds, g, rng, "$.direction");

  DerivativeResult d = dirdiff_vi(u, h, cfg);
  FDQuotients fd = dirdiff_fd(u, h, cfg, alphas);

  double hsup = 1.0 + h.sup_norm();
  double dev = 0.0;
  std::size_t stable = 0;
  for (std::size_t k = 0; k < fd.grid.size(); ++k) {
    if (fd.stabilization[k] > 1e-3 * hsup) continue;  // still moving across alphas
    ++stable;
    double t = fd.grid[k];
    double a = std::fabs(d.eta.eval(t, Side::Value) - fd.limit[k]);
    double b = std::fabs(d.eta.eval(t, Side::Left) - fd.limit[k]);
    dev = std::max(dev, std::min(a, b));
  }
  Checks ck;
  ck.add_leq("max |eta - fd quotient| at stable nodes", dev, tol);
  double jump_land = 0.0;
  for (std::size_t k = 0; k < d.eta.grid().size(); ++k) {
    if (std::fabs(d.eta.value()[k] - d.eta.left()[k]) > 1e-10 * hsup)
      jump_land = std::max(jump_land, std::fabs(d.eta.value()[k]));
  }
  ck.add_leq("jump landing max |eta| at its jumps", jump_land, 1e-10 * hsup);
  double var_slack = d.eta.total_variation() - 2.0 * h.total_variation();
  ck.add_leq("variation bound var(eta) - 2 var(h)", var_slack, 1e-9);

  Series se;
  const TimeGrid& eg = d.eta.grid();
  StopSolution sol = stop(u, cfg);
  for (std::size_t k = 0; k < eg.size(); ++k) {
    se.t.push_back(eg[k]);
    se.y.push_back(sol.y.eval(eg[k]));
    se.u.push_back(u.eval(eg[k]));
    se.eta.push_back(d.eta.value()[k]);
  }
  json result{{"kind", "derivative"},
              {"seed", seed},
              {"checks", ck.arr},
              {"pass", ck.all},
              {"columns", column_units()},
              {"stable_nodes", stable},
              {"fd_nodes", fd.grid.size()},
              {"alphas", alphas}};
  write_outputs(out_dir, result, se);
  return ck.all ? 0 : 2;
}

int run_stationarity(const json& root, unsigned long long seed, const std::string& out_dir) {
  HysteresisConfig cfg = parse_config(root, "$");
  GridSpec gs = parse_grid(root, "$");
  const json* sig = find_field(root, "signal");
  if (!sig) fail("$", "missing required object \"signal\"");
  SignalSpec ss = parse_signal(*sig, "$.signal");
  double tol = opt_num(root, "tolerance", "$", 1e-6);
  long long samples = opt_int(root, "samples", "$", 8);
  if (samples < 1) fail("$.samples", "must be at least 1");

  Rng rng(seed);
  TimeGrid g = build_grid(gs, rng);
  bool dummy = false;
  ControlProblem prob;
  prob.cfg = cfg;
  prob.grid = g;
  prob.objective = parse_objective(root, g, rng, "$", &dummy);
  PLFunction u = build_signal(ss, g, rng, "$.signal");

  ObjectiveValue ev = objective_eval(prob, u);
  AdjointPair pair = build_adjoint(ev.grad);

  StationaritySamples extra;
  std::vector<PLFunction> dirs;
  for (long long i = 0; i < samples; ++i) {
    PLFunction h = random_pl(rng, g, 1.0);
    DerivativeResult d = dirdiff_vi(u, h, cfg);
    extra.cone_zs.push_back(d.eta);
    if (i * 2 < samples) extra.reg_zs.push_back(d.eta);
    extra.hs.push_back(h);
    dirs.push_back(std::move(h));
  }
  RegimeClassification cls = classify_regimes(ev.sol, cfg);
  for (long long i = 0; i * 2 < samples; ++i) {
    extra.cone_zs.push_back(random_cone_feasible(rng, cls, 1.0, i % 2 == 0));
    extra.reg_zs.push_back(random_regulated(rng, ev.sol.grid(), 1.0, 0.3));
  }

  StationarityReport rep = check_strong_stationarity(ev.sol, cfg, pair, ev.grad, extra, tol);
  BouligandResult br = bouligand_residual(u, ev.grad, dirs, cfg);
  double bt = tol * ev.grad.scale();

  Checks ck;
  ck.add("directional derivative min over sampled family", br.min_value, -bt,
         br.min_value >= -bt);
  ck.add("stationarity system", rep.pass ? 0.0 : 1.0, 0.0, rep.pass);

  Series se;
  const TimeGrid& og = ev.sol.grid();
  for (std::size_t k = 0; k < og.size(); ++k) {
    se.t.push_back(og[k]);
    se.y.push_back(ev.sol.y.value(k));
    se.u.push_back(u.eval(og[k]));
    se.p.push_back(pair.p.eval(og[k], Side::Value));
  }
  json result{{"kind", "stationarity"},
              {"seed", seed},
              {"checks", ck.arr},
              {"pass", ck.all},
              {"columns", column_units()},
              {"objective", ev.j},
              {"report", json::parse(stationarity_report_json(rep))}};
  write_outputs(out_dir, result, se);
  return ck.all ? 0 : 2;
}

int run_optimize(const json& root, unsigned long long seed, const std::string& out_dir) {
  HysteresisConfig cfg = parse_config(root, "$");
  GridSpec gs = parse_grid(root, "$");
  double tol = opt_num(root, "tolerance", "$", 1e-6);

  Rng rng(seed);
  TimeGrid g = build_grid(gs, rng);
  bool dummy = false;
  ControlProblem prob;
  prob.cfg = cfg;
  prob.grid = g;
  prob.objective = parse_objective(root, g, rng, "$", &dummy);
  const json* box = find_field(root, "box");
  if (box) {
    if (!box->is_object()) fail("$.box", "must be an object");
    check_keys(*box, "$.box", {"lower", "upper"});
    auto bound = [&](const char* key) {
      const json* b = find_field(*box, key);
      if (!b) fail("$.box", std::string("missing \"") + key + "\"");
      if (b->is_number()) return PLFunction::constant(g, b->get<double>());
      SignalSpec s = parse_signal(*b, std::string("$.box.") + key);
      return build_signal(s, g, rng, std::string("$.box.") + key);
    };
    prob.admissible = AdmissibleKind::Box;
    prob.lower = bound("lower");
    prob.upper = bound("upper");
  }
  SolveOptions opts = parse_solver(root, "$");
  opts.seed = seed;

  SolveResult sr = solve(prob, opts);
  ObjectiveValue fin = objective_eval(prob, sr.u_star);

  Checks ck;
  double bt = tol * fin.grad.scale();
  ck.add("directional derivative min over sampled family", sr.bouligand, -bt,
         sr.bouligand >= -bt);
  if (sr.checked) ck.add("stationarity system", sr.report.pass ? 0.0 : 1.0, 0.0, sr.report.pass);

  double uptick = 0.0;
  for (std::size_t k = 1; k < sr.objective_trace.size(); ++k)
    uptick = std::max(uptick, sr.objective_trace[k] - sr.objective_trace[k - 1]);

  Series se;
  AdjointPair pair = build_adjoint(fin.grad);
  const TimeGrid& og = fin.sol.grid();
  for (std::size_t k = 0; k < og.size(); ++k) {
    se.t.push_back(og[k]);
    se.y.push_back(fin.sol.y.value(k));
    se.u.push_back(sr.u_star.eval(og[k]));
    se.p.push_back(pair.p.eval(og[k], Side::Value));
  }
  json result{{"kind", "optimize"},
              {"seed", seed},
              {"checks", ck.arr},
              {"pass", ck.all},
              {"columns", column_units()},
              {"objective", fin.j},
              {"objective_trace", sr.objective_trace},
              {"stage_starts", sr.stage_starts},
              {"max_trace_uptick", uptick},
              {"bouligand_residual", sr.bouligand},
              {"note", sr.note},
              {"u_star", sr.u_star.values()}};
  if (sr.checked) result["report"] = json::parse(stationarity_report_json(sr.report));
  write_outputs(out_dir, result, se);
  return ck.all ? 0 : 2;
}

int run_counterexample(const json& root, unsigned long long seed, const std::string& out_dir) {
  double tol = opt_num(root, "tolerance", "$", 1e-9);
  std::vector<double> nl_d =
      opt_num_array(root, "n_list", "$", {1, 2, 4, 8, 16, 32, 64});
  std::vector<int> n_list;
  for (double v : nl_d) {
    if (v < 1 || v != std::floor(v)) fail("$.n_list", "entries must be positive integers");
    n_list.push_back(static_cast<int>(v));
  }

  CounterexampleTable tab = counterexample_demo(n_list);
  Checks ck;
  double dev_bv_u = 0.0, dev_bv_y = 0.0, dev_probe = 0.0;
  for (const CounterexampleRow& row : tab.rows) {
    dev_bv_u = std::max(dev_bv_u, std::fabs(row.bv_u - 4.0));
    dev_bv_y = std::max(dev_bv_y, std::fabs(row.bv_y - 3.0));
    for (std::size_t q = 0; q < tab.probe_times.size(); ++q) {
      if (2.0 / row.n <= tab.probe_times[q])
        dev_probe = std::max(dev_probe, std::fabs(row.probes[q] + 1.0));
    }
  }
  ck.add_leq("max |BV(u_n) - 4|", dev_bv_u, tol);
  ck.add_leq("max |BV(y_n) - 3|", dev_bv_y, tol);
  ck.add_leq("max |y_n(t) + 1| at settled probes", dev_probe, tol);
  double dev_zero = 0.0;
  for (double v : tab.zero_probes) dev_zero = std::max(dev_zero, std::fabs(v - 1.0));
  ck.add_leq("zero-input response deviation from 1", dev_zero, tol);

  json rows = json::array();
  for (const CounterexampleRow& row : tab.rows)
    rows.push_back(
        {{"n", row.n}, {"bv_u", row.bv_u}, {"bv_y", row.bv_y}, {"probes", row.probes}});

  // time series of the finest member of the family
  Series se;
  {
    int n = *std::max_element(n_list.begin(), n_list.end());
    std::vector<double> nodes;
    double tb = 2.0 / n;
    for (int k = 0; k <= 128; ++k) nodes.push_back(tb * (k / 128.0));
    if (n > 1)
      for (int k = 1; k <= 64; ++k) nodes.push_back(tb + (2.0 - tb) * (k / 64.0));
    TimeGrid g(std::move(nodes));
    std::vector<double> uv(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) uv[k] = bump2(n * g[k]);
    PLFunction u(g, std::move(uv));
    HysteresisConfig cfg{1.0, 1.0};
    StopSolution sol = stop(u, cfg);
    for (std::size_t k = 0; k < g.size(); ++k) {
      se.t.push_back(g[k]);
      se.y.push_back(sol.y.value(k));
      se.u.push_back(u.value(k));
    }
  }
  json result{{"kind", "counterexample"},
              {"seed", seed},
              {"checks", ck.arr},
              {"pass", ck.all},
              {"columns", column_units()},
              {"probe_times", tab.probe_times},
              {"rows", rows},
              {"zero_probes", tab.zero_probes}};
  write_outputs(out_dir, result, se);
  return ck.all ? 0 : 2;
}

GridRegulated pick_regulated(Rng& rng, const TimeGrid& g, int which) {
  switch (which % 4) {
    case 0: return random_regulated(rng, g, 1.0, 0.35);
    case 1: return random_rc_step(rng, g, 1.0);
    case 2: return GridRegulated::from_pl(random_pl(rng, g, 1.0));
    default: return random_node_supported(rng, g, 1.0);
  }
}

int run_ks_selftest(const json& root, unsigned long long seed, const std::string& out_dir) {
  double tol = opt_num(root, "tolerance", "$", 1e-8);
  long long samples = opt_int(root, "samples", "$", 100);
  if (samples < 1) fail("$.samples", "must be at least 1");
  long long depth = opt_int(root, "depth", "$", 10);
  if (depth < 1 || depth > 16) fail("$.depth", "must be in [1, 16]");

  Rng rng(seed);
  double worst_oracle = 0.0, worst_parts = 0.0, worst_support = 0.0;
  for (long long i = 0; i < samples; ++i) {
    double T = 0.5 + 0.5 * static_cast<double>(i % 4);
    TimeGrid gf = random_grid(rng, T, 5 + static_cast<std::size_t>(i % 13), 0.35);
    TimeGrid gg = random_grid(rng, T, 4 + static_cast<std::size_t>((i / 2) % 11), 0.35);
    GridRegulated f = pick_regulated(rng, gf, static_cast<int>(i));
    GridRegulated g2 = pick_regulated(rng, gg, static_cast<int>(i / 4 + 1));
    double a = 0.0, b = T;
    if (i % 3 == 1) {
      a = 0.23 * T;
      b = 0.81 * T;
    }
    double v1 = ks_integrate(f, g2, a, b);
    double v2 = refinement_sum(f, g2, a, b, static_cast<int>(depth));
    worst_oracle = std::max(worst_oracle, std::fabs(v1 - v2) / (1.0 + std::fabs(v1)));

    GridRegulated rc = random_rc_step(rng, gf, 1.0);
    PartialIntegrationCheck pc = partial_integration_check(rc, kTolEq);
    worst_parts = std::max(worst_parts, std::fabs(pc.residual()) / (1.0 + std::fabs(pc.lhs)));

    GridRegulated ns = random_node_supported(rng, gg, 1.0);
    std::vector<GridRegulated> fam;
    for (int q = 0; q < 4; ++q) fam.push_back(GridRegulated::from_pl(random_pl(rng, gg, 1.0)));
    worst_support = std::max(worst_support, countable_support_max(ns, fam));
  }

  Checks ck;
  ck.add_leq("integral vs refinement oracle (relative)", worst_oracle, tol);
  ck.add_leq("partial integration identity (relative)", worst_parts, tol);
  ck.add_leq("node-supported integrator annihilation", worst_support, tol);

  Series se;  // no time series for this kind
  json result{{"kind", "ks-selftest"},
              {"seed", seed},
              {"checks", ck.arr},
              {"pass", ck.all},
              {"columns", column_units()},
              {"samples", samples},
              {"depth", depth}};
  write_outputs(out_dir, result, se);
  return ck.all ? 0 : 2;
}

int run_parsed(const json& root, const std::string& out_dir) {
  if (!root.is_object()) fail("$", "scenario must be a JSON object");
  std::string kind = need_str(root, "kind", "$");

  // per-kind key whitelists (strict: typos are schema errors)
  if (kind == "stop")
    check_keys(root, "$", {"kind", "seed", "config", "grid", "signal", "samples", "tolerance"});
  else if (kind == "derivative")
    check_keys(root, "$",
               {"kind", "seed", "config", "grid", "signal", "direction", "alphas", "tolerance"});
  else if (kind == "stationarity")
    check_keys(root, "$",
               {"kind", "seed", "config", "grid", "signal", "objective", "samples", "tolerance"});
  else if (kind == "optimize")
    check_keys(root, "$",
               {"kind", "seed", "config", "grid", "objective", "solver", "box", "tolerance"});
  else if (kind == "counterexample")
    check_keys(root, "$", {"kind", "seed", "n_list", "tolerance"});
  else if (kind == "ks-selftest")
    check_keys(root, "$", {"kind", "seed", "samples", "depth", "tolerance"});
  else
    fail("$.kind",
         "must be one of stop, derivative, stationarity, optimize, counterexample, ks-selftest");

  // decide whether the scenario draws random numbers before running it
  bool uses_rng = kind == "stationarity" || kind == "optimize" || kind == "ks-selftest";
  if (const json* g = find_field(root, "grid"); g && g->is_object())
    if (opt_num(*g, "jitter", "$.grid", 0.0) > 0.0) uses_rng = true;
  for (const char* key : {"signal", "direction"})
    if (const json* s = find_field(root, key); s && s->is_object())
      if (const json* t = find_field(*s, "type"); t && t->is_string()) {
        std::string ty = t->get<std::string>();
        if (ty == "random" || ty == "random-walk") uses_rng = true;
      }
  if (kind == "stop") uses_rng = true;  // the test-function family is sampled

  const json* sf = find_field(root, "seed");
  unsigned long long seed = 0;
  if (sf) {
    if (!sf->is_number_integer() || sf->get<long long>() < 0)
      fail("$.seed", "must be a nonnegative integer");
    seed = sf->get<unsigned long long>();
  } else if (uses_rng) {
    fail("$.seed", "required for randomized scenarios");
  }
  seed = effective_seed(seed);

  if (kind == "stop") return run_stop(root, seed, out_dir);
  if (kind == "derivative") return run_derivative(root, seed, out_dir);
  if (kind == "stationarity") return run_stationarity(root, seed, out_dir);
  if (kind == "optimize") return run_optimize(root, seed, out_dir);
  if (kind == "counterexample") return run_counterexample(root, seed, out_dir);
  return run_ks_selftest(root, seed, out_dir);
}

}  // namespace

unsigned long long effective_seed(unsigned long long scenario_seed) {
  const char* env = std::getenv("HYSTERIX_SEED");
  if (!env || !*env) return scenario_seed;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    throw ScenarioError("HYSTERIX_SEED must be an unsigned integer");
  return v;
}

int run_scenario_text(const std::string& text, const std::string& out_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ScenarioError("scenario JSON syntax error at line " + std::to_string(line) +
                        ", column " + std::to_string(col));
  }
  try {
    return run_parsed(root, out_dir);
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("scenario execution failed: ") + e.what());
  }
}

int run_scenario_file(const std::string& path, const std::string& out_dir) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot read scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return run_scenario_text(buf.str(), out_dir);
}

}  // namespace hysterix
