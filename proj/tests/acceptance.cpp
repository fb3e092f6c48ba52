// End-to-end acceptance harness. Eight scripted checks, each printed as a
// single [PASS]/[FAIL] line with its runtime; the process exits nonzero when
// any check fails. Tolerances are pinned here on purpose and must not be
// loosened to make a run green.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hysterix/control.hpp"
#include "hysterix/ksint.hpp"
#include "hysterix/sensitivity.hpp"
#include "hysterix/signals.hpp"
#include "hysterix/stationarity.hpp"

using namespace hysterix;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  std::string err;   // empty = pass; otherwise the first failure, described
  long checks = 0;
};

std::string strf(const char* fmt, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

// got <= bound
bool ck_le(Outcome& o, double got, double bound, const char* what) {
  ++o.checks;
  if (got <= bound) return true;
  if (o.err.empty()) o.err = strf("%s: got %.3e, bound %.3e", what, got, bound);
  return false;
}

// got >= bound
bool ck_ge(Outcome& o, double got, double bound, const char* what) {
  ++o.checks;
  if (got >= bound) return true;
  if (o.err.empty()) o.err = strf("%s: got %.3e, floor %.3e", what, got, bound);
  return false;
}

bool ck(Outcome& o, bool ok, const std::string& what) {
  ++o.checks;
  if (ok) return true;
  if (o.err.empty()) o.err = what;
  return false;
}

struct Harness {
  int failures = 0;
  int index = 0;

  void run(const char* name, double budget_s, const std::function<Outcome()>& body) {
    ++index;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.err = std::string("unexpected exception: ") + e.what();
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.err.empty() && dt > budget_s)
      o.err = strf("runtime %.1f s exceeds the %.0f s budget", dt, budget_s);
    if (o.err.empty()) {
      std::printf("[PASS] %d. %-68s (%ld checks, %.2f s)\n", index, name, o.checks, dt);
    } else {
      std::printf("[FAIL] %d. %-68s (%.2f s) %s\n", index, name, dt, o.err.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
};

// four flavours of regulated data, same mix the integral tests use
GridRegulated mixed(Rng& rng, const TimeGrid& g, int which) {
  switch (which % 4) {
    case 0: return random_regulated(rng, g, 1.0, 0.4);
    case 1: return random_rc_step(rng, g, 1.0);
    case 2: return GridRegulated::from_pl(random_pl(rng, g, 1.0));
    default: return random_node_supported(rng, g, 1.0);
  }
}

// ---------------------------------------------------------------------------
// 1. Stieltjes integral identities plus the independent refinement oracle.
Outcome check_integral_identities() {
  Outcome o;
  Rng rng(101);
  for (int i = 0; i < 500; ++i) {
    double T = 1.0 + (i % 4) * 0.75;
    TimeGrid gg = random_grid(rng, T, 5 + i % 9, 0.35);
    GridRegulated g = mixed(rng, gg, i + 1);
    bool sub = (i % 3 == 0);
    double a = sub ? 0.23 * T : 0.0;
    double b = sub ? 0.81 * T : T;

    // constants telescope to the integrator increment
    double c = (i % 7) * 0.31 - 1.0;
    double vc = ks_integrate(GridRegulated::constant(gg, c), g, a, b);
    ck_le(o, std::fabs(vc - c * (g.eval(b) - g.eval(a))), 1e-10, "constants rule");

    // a single point mass picks out the integrand value
    double s = (i % 2 == 0) ? gg[1 + i % (gg.size() - 2)] : 0.37 * T;
    double mass = 1.5 - (i % 5) * 0.6;
    GridRegulated gpm = scale(interval_indicator(gg, s, T, IntervalKind::Closed), mass);
    GridRegulated f = mixed(rng, gg, i);
    ck_le(o, std::fabs(ks_integrate(f, gpm) - mass * f.eval(s)), 1e-10, "point mass");

    // additivity at node and non-node split points
    std::size_t mid = gg.size() / 2;
    for (double m : {gg[mid], 0.5 * (gg[mid] + gg[mid + 1])}) {
      double split = ks_integrate(f, g, 0.0, m) + ks_integrate(f, g, m, T);
      ck_le(o, std::fabs(split - ks_integrate(f, g)), 1e-10, "interval additivity");
    }

    // subinterval indicators measure one-sided integrator increments
    double c0 = 0.2 * T, d0 = 0.8 * T;
    double vcl = ks_integrate(interval_indicator(gg, c0, d0, IntervalKind::Closed), g);
    ck_le(o, std::fabs(vcl - (g.eval(d0, Side::Right) - g.eval(c0, Side::Left))), 1e-10,
          "closed indicator");
    double vop = ks_integrate(interval_indicator(gg, c0, d0, IntervalKind::Open), g);
    ck_le(o, std::fabs(vop - (g.eval(d0, Side::Left) - g.eval(c0, Side::Right))), 1e-10,
          "open indicator");

    // node-supported integrators annihilate everything
    GridRegulated gns = random_node_supported(rng, gg, 1.0);
    std::vector<GridRegulated> family;
    for (int q = 0; q < 5; ++q) family.push_back(mixed(rng, gg, i + q));
    ck_le(o, countable_support_max(gns, family), 1e-10, "countable support");

    // integration by parts for right-continuous step data
    PartialIntegrationCheck pic = partial_integration_check(random_rc_step(rng, gg, 1.0), 1e-12);
    ck_le(o, std::fabs(pic.residual()), 1e-10, "partial integration");

    // closed form against the tagged refinement sum at depth 12
    TimeGrid gw = random_grid(rng, T, 4 + (i / 2) % 8, 0.35);
    GridRegulated f2 = mixed(rng, gw, i + 2);
    double v1 = ks_integrate(f2, g, a, b);
    double v2 = refinement_sum(f2, g, a, b, 12);
    ck_le(o, std::fabs(v1 - v2), 1e-8 * std::max(1.0, std::fabs(v1)), "refinement oracle");
  }
  return o;
}

// ---------------------------------------------------------------------------
// 2. Stop operator: in-band tracking, Lipschitz stability, order preservation
//    and the defining variational inequality.
Outcome check_stop_operator() {
  Outcome o;

  // a sine quarter wave never leaves the band, so the output equals the input
  {
    TimeGrid gs = TimeGrid::uniform(kPi / 2.0, 200);
    PLFunction us = sample_sin(gs);
    HysteresisConfig cfg{1.0, 0.0};
    StopSolution sol = stop(us, cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < sol.grid().size(); ++k) {
      double t = sol.grid()[k];
      worst = std::max(worst, std::fabs(sol.y.eval(t) - us.eval(t)));
    }
    ck_le(o, worst, 1e-12, "sine stays inside the band");
  }

  // Lipschitz bound 2 ||u1 - u2|| on 1000 random pairs
  Rng rng(202);
  for (int i = 0; i < 1000; ++i) {
    TimeGrid g = random_grid(rng, 2.0 + i % 3, 30 + i % 50, 0.3);
    PLFunction u1 = random_walk_pl(rng, g, 0.0, 0.7);
    PLFunction u2 = add(u1, random_pl(rng, g, 0.4));
    HysteresisConfig cfg{1.0, 0.0};
    StopSolution s1 = stop(u1, cfg), s2 = stop(u2, cfg);
    double du = sub(u1, u2).sup_norm();
    TimeGrid m = s1.grid().merged_with(s2.grid());
    double dy = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k)
      dy = std::max(dy, std::fabs(s1.y.eval(m[k]) - s2.y.eval(m[k])));
    ck_le(o, dy, 2.0 * du + 1e-12, "Lipschitz bound");
  }

  // order preservation: a nondecreasing gap between inputs keeps the outputs
  // ordered at every merged node
  for (int i = 0; i < 500; ++i) {
    TimeGrid g = random_grid(rng, 2.0, 25 + i % 30, 0.3);
    PLFunction u1 = random_walk_pl(rng, g, 0.0, 0.8);
    std::uniform_real_distribution<double> U(0.0, 0.3);
    std::vector<double> v = u1.values();
    double gap = U(rng);
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] += gap;
      gap += U(rng);  // nondecreasing difference
    }
    PLFunction u2(g, v);
    HysteresisConfig cfg{1.0, 0.0};
    StopSolution s1 = stop(u1, cfg), s2 = stop(u2, cfg);
    TimeGrid m = s1.grid().merged_with(s2.grid());
    double worst = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k)
      worst = std::min(worst, s2.y.eval(m[k]) - s1.y.eval(m[k]));
    ck_ge(o, worst, -1e-12, "order preservation");
  }

  // variational inequality against 200 admissible test functions per input
  for (int i = 0; i < 100; ++i) {
    TimeGrid g = random_grid(rng, 2.0, 40, 0.3);
    PLFunction u = random_walk_pl(rng, g, 0.0, 0.8);
    HysteresisConfig cfg{1.0, 0.0};
    StopSolution sol = stop(u, cfg);
    std::vector<GridRegulated> fam;
    fam.push_back(GridRegulated::constant(sol.grid(), 0.0));
    fam.push_back(GridRegulated::constant(sol.grid(), cfg.r));
    fam.push_back(GridRegulated::constant(sol.grid(), -cfg.r));
    while (fam.size() < 200) {
      std::vector<double> v = random_pl(rng, sol.grid(), 1.6).values();
      for (double& x : v) x = std::clamp(x, -cfg.r, cfg.r);
      fam.push_back(GridRegulated::from_pl(PLFunction(sol.grid(), v)));
    }
    VIResidual res = vi_residual(sol, fam, 0.0, g.duration(), cfg);
    ck_ge(o, res.min_value, -1e-10, "variational inequality");
  }
  return o;
}

// ---------------------------------------------------------------------------
// 3. Bounded-variation counterexample: variation norms stay put while the
//    pointwise values converge to the wrong limit.
Outcome check_counterexample() {
  Outcome o;
  std::vector<int> ns{1, 2, 4, 8, 16, 32, 64};
  CounterexampleTable tab = counterexample_demo(ns);

  ck(o, tab.probe_times == std::vector<double>{0.25, 0.5, 1.0, 1.5},
     "unexpected probe times");
  ck(o, tab.rows.size() == ns.size(), "row count mismatch");
  for (const CounterexampleRow& row : tab.rows) {
    ck_le(o, std::fabs(row.bv_u - 4.0), 1e-9, "input variation norm");
    ck_le(o, std::fabs(row.bv_y - 3.0), 1e-9, "output variation norm");
    if (row.n >= 16)
      for (double p : row.probes)
        ck_le(o, std::fabs(p - (-1.0)), 1e-9, "pointwise limit at the probes");
  }
  for (double z : tab.zero_probes)
    ck_le(o, std::fabs(z - 1.0), 1e-12, "zero-input response");
  return o;
}

// ---------------------------------------------------------------------------
// 4. Directional derivative: finite-difference agreement at settled nodes,
//    jump structure, variation bound, homogeneity and the derivative
//    variational inequality.
Outcome check_directional_derivative() {
  Outcome o;
  Rng rng(404);
  long stable = 0;
  for (int i = 0; i < 100; ++i) {
    TimeGrid g = random_grid(rng, 2.0, 200, 0.3);
    PLFunction u = random_walk_pl(rng, g, 0.0, 0.35);
    PLFunction h = random_pl(rng, g, 1.0);
    HysteresisConfig cfg{1.0, 0.0};
    DerivativeResult d = dirdiff_vi(u, h, cfg);

    // finite differences at alpha = 1e-6, filtered where the quotient is
    // still moving between neighbouring step sizes (regime boundaries)
    std::vector<double> alphas{1e-6, 2e-6};
    FDQuotients fd = dirdiff_fd(u, h, cfg, alphas);
    double hs = 1.0 + h.sup_norm();
    for (std::size_t k = 0; k < fd.grid.size(); ++k) {
      if (fd.stabilization[k] > 1e-3 * hs) continue;
      ++stable;
      double dv = std::fabs(d.eta.eval(fd.grid[k], Side::Value) - fd.limit[k]);
      double dl = std::fabs(d.eta.eval(fd.grid[k], Side::Left) - fd.limit[k]);
      ck_le(o, std::min(dv, dl), 5e-4, "finite-difference agreement");
    }

    // right continuity, jumps land exactly at zero, zero start
    ck_le(o, std::fabs(d.eta.value()[0]), 0.0, "derivative starts at zero");
    for (std::size_t k = 0; k < d.eta.grid().size(); ++k) {
      ck_le(o, std::fabs(d.eta.right()[k] - d.eta.value()[k]), 1e-12, "right continuity");
      if (std::fabs(d.eta.value()[k] - d.eta.left()[k]) > 1e-12)
        ck_le(o, std::fabs(d.eta.value()[k]), 1e-12, "jump lands at zero");
    }

    // uniform variation bound
    ck_le(o, d.eta.total_variation(), 2.0 * h.total_variation() + 1e-9, "variation bound");

    // positive homogeneity
    for (double lam : {2.0, 3.0}) {
      DerivativeResult d2 = dirdiff_vi(u, scale(h, lam), cfg);
      ck_le(o, sup_dist(d2.eta, scale(d.eta, lam)), 1e-12, "positive homogeneity");
    }

    // derivative variational inequality over 100 cone-feasible competitors
    std::vector<GridRegulated> zs;
    zs.push_back(d.eta);
    for (int q = 0; q < 99; ++q)
      zs.push_back(random_cone_feasible(rng, d.regimes, 1.0, q % 2 == 0));
    DerivativeVIResidual res = derivative_vi_residual(d, h, zs, g.duration());
    ck_ge(o, res.min_value, -1e-9, "derivative variational inequality");
  }
  // the stabilization filter must keep the bulk of the nodes
  ck(o, stable >= 10000, strf("too few settled nodes for the quotient test: %ld", stable));
  return o;
}

// ---------------------------------------------------------------------------
// 5. Radial directions: along certified directions the state moves exactly
//    linearly and the derivative equals the direction itself.
Outcome check_radial_directions() {
  Outcome o;
  Rng rng(505);
  int built = 0;
  for (int attempt = 0; attempt < 800 && built < 50; ++attempt) {
    TimeGrid g = random_grid(rng, 2.0, 24, 0.4);
    PLFunction u = random_walk_pl(rng, g, 0.0, 0.7);
    HysteresisConfig cfg{1.0, 0.0};
    StopSolution sol = stop(u, cfg);
    RegimeClassification cls = classify_regimes(sol, cfg);

    PLFunction h;
    if (attempt % 2 == 0) {
      h = random_cone_feasible_pl(rng, cls, 0.6);
    } else {
      // a mollified two-level approximant is radial by construction
      PLFunction hr = random_pl(rng, g, 1.0);
      DerivativeResult dr = dirdiff_vi(u, hr, cfg);
      if (dr.eta.sup_norm() < 1e-3) continue;
      std::vector<int> one{16};
      h = polyhedric_approx(dr.eta, 4, one, sol, cfg).z_ij[0];
    }
    if (h.sup_norm() < 1e-3) continue;
    auto alpha = radial_membership(h, sol, cfg);
    if (!alpha || *alpha < 1e-8) continue;
    ++built;

    TimeGrid eg = sol.grid().merged_with(h.grid());
    PLFunction hh = h.on_grid(eg);
    PLFunction uu = u.on_grid(eg);
    for (double beta : {*alpha / 2.0, *alpha / 4.0}) {
      StopSolution moved = stop(add(uu, scale(hh, beta)), cfg);
      TimeGrid m = moved.grid().merged_with(eg);
      double worst = 0.0;
      for (std::size_t k = 0; k < m.size(); ++k) {
        double want = sol.y.eval(m[k]) + beta * hh.eval(m[k]);
        worst = std::max(worst, std::fabs(moved.y.eval(m[k]) - want));
      }
      ck_le(o, worst, 1e-10, "state moves linearly along the direction");
    }

    DerivativeResult d = dirdiff_vi(uu, hh, cfg);
    ck_le(o, sup_dist(d.eta, GridRegulated::from_pl(hh)), 1e-10,
          "derivative equals the radial direction");
  }
  ck(o, built == 50, strf("only %d radial directions certified out of 50", built));
  return o;
}

// ---------------------------------------------------------------------------
// 6. Two-level approximation of reduced-cone directions: uniform closeness of
//    the first level, radial membership and sup bounds of the second, and
//    pointwise convergence away from the shrinking jump windows.
Outcome check_two_level_approximation() {
  Outcome o;
  Rng rng(606);
  std::vector<int> i_list{4, 8, 16, 32, 64};
  std::vector<int> j_list{1, 2, 4, 8, 16, 32};
  int done = 0;
  for (int t = 0; done < 50 && t < 200; ++t) {
    TimeGrid g = random_grid(rng, 2.0, 18 + t % 12, 0.4);
    PLFunction u = random_walk_pl(rng, g, 0.0, 0.8);
    HysteresisConfig cfg{1.0, 0.0};
    StopSolution sol = stop(u, cfg);
    PLFunction h = random_pl(rng, g, 1.0);
    DerivativeResult d = dirdiff_vi(u, h, cfg);
    if (d.eta.sup_norm() < 1e-6) continue;
    ++done;
    double zsup = d.eta.sup_norm();

    for (int j : j_list) {
      PolyhedricApprox ap = polyhedric_approx(d.eta, j, i_list, sol, cfg);
      ck_le(o, std::fabs(ap.xi - 1.0 / j), 1e-15, "first-level resolution");
      ck_le(o, sup_dist(ap.z_j, d.eta), 1.0 / j + 1e-12, "first-level sup distance");
      ck(o, ap.z_ij.size() == i_list.size(), "second-level family size");
      for (const PLFunction& zi : ap.z_ij) {
        ck_le(o, zi.sup_norm(), zsup + 1e-12, "second-level sup bound");
        auto alpha = radial_membership(zi, sol, cfg);
        if (!ck(o, alpha.has_value() && *alpha > 0.0, "second level must be radial")) continue;
      }
      // pointwise convergence to the first level away from the jump windows
      const PLFunction& zlast = ap.z_ij.back();
      int ilast = i_list.back();
      double far = 0.0;
      for (std::size_t k = 0; k < sol.grid().size(); ++k) {
        double s = sol.grid()[k];
        bool near_jump = false;
        for (std::size_t n = 0; n < ap.z_j.grid().size(); ++n) {
          if (std::fabs(ap.z_j.value()[n] - ap.z_j.left()[n]) > 1e-12 &&
              std::fabs(s - ap.z_j.grid()[n]) <= 4.0 / ilast)
            near_jump = true;
        }
        if (!near_jump) far = std::max(far, std::fabs(zlast.eval(s) - ap.z_j.eval(s)));
      }
      ck_le(o, far, 1e-9, "pointwise convergence away from jump windows");
    }
  }
  ck(o, done == 50, strf("only %d reduced-cone directions exercised out of 50", done));
  return o;
}

// ---------------------------------------------------------------------------
// 7. Polar probes: a probe whose height lies in the polar cone at its anchor
//    produces no response outside its own rise window.
Outcome check_polar_probes() {
  Outcome o;

  // one trajectory visiting every regime: rise to +r, rest, press, cross to
  // -r, rest there, release
  TimeGrid g({0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
  PLFunction u(g, {0.0, 1.0, 1.0, 3.0, -2.5, -2.5, -0.7});
  HysteresisConfig cfg{1.0, 0.0};
  StopSolution sol = stop(u, cfg);
  RegimeClassification cls = classify_regimes(sol, cfg);

  // make sure all four classes really occur
  bool seen[4] = {false, false, false, false};
  for (Regime r : cls.node) seen[static_cast<int>(r)] = true;
  for (Regime r : cls.interval) seen[static_cast<int>(r)] = true;
  ck(o, seen[0] && seen[1] && seen[2] && seen[3],
     "fixture must visit every regime class");

  struct Probe {
    double t, c;
  };
  std::vector<Probe> probes{{1.0, 0.8},   // resting at +r: polar is [0, inf)
                            {4.0, -0.8},  // resting at -r: polar is (-inf, 0]
                            {2.5, 0.6},   // pressing: polar is all of R
                            {2.5, -0.6},
                            {0.5, 0.0}};  // strictly inside: polar is {0}
  for (const Probe& pr : probes) {
    for (int i : {4, 8, 16, 32, 64}) {
      PLFunction hi = polar_probe(pr.t, pr.c, i, sol, cfg);
      DerivativeResult d = dirdiff_vi(u, hi, cfg);
      double outside = 0.0;
      for (std::size_t k = 0; k < d.eta.grid().size(); ++k) {
        double s = d.eta.grid()[k];
        if (s <= pr.t - 1.0 / i - 1e-12 || s >= pr.t - 1e-12)
          outside = std::max(outside, std::fabs(d.eta.value()[k]));
      }
      ck_le(o, outside, 1e-9, "response outside the rise window");

      // the probe itself converges pointwise to c on [t, T] and 0 before
      for (std::size_t k = 0; k < sol.grid().size(); ++k) {
        double s = sol.grid()[k];
        if (s >= pr.t)
          ck_le(o, std::fabs(hi.eval(s) - pr.c), 1e-12, "probe equals c from t onward");
        else if (s <= pr.t - 1.0 / i)
          ck_le(o, std::fabs(hi.eval(s)), 1e-12, "probe vanishes before its window");
      }
    }
  }

  // heights outside the polar cone are rejected
  bool threw = false;
  try {
    polar_probe(1.0, -0.8, 8, sol, cfg);
  } catch (const std::exception&) {
    threw = true;
  }
  ck(o, threw, "downhill probe at +r must be rejected");
  try {
    threw = false;
    polar_probe(0.5, 0.3, 8, sol, cfg);
  } catch (const std::exception&) {
    threw = true;
  }
  ck(o, threw, "nonzero probe at an interior time must be rejected");
  return o;
}

// ---------------------------------------------------------------------------
// 8. Solver output carries a full stationarity certificate, and the checker
//    rejects deliberately corrupted certificates.
Outcome check_stationarity_certificates() {
  Outcome o;
  struct Inst {
    double T, r, y0, yT, nu;
    unsigned long long seed;
  };
  std::vector<Inst> insts{
      {1.5, 1.0, 0.0, 0.5, 1e-3, 901},   {2.0, 1.0, 0.0, -0.4, 1e-3, 902},
      {2.0, 0.8, 0.2, 0.3, 2e-3, 903},   {2.5, 1.2, -0.5, 0.6, 5e-4, 904},
      {3.0, 1.0, 0.5, -0.6, 1e-3, 905},  {1.5, 0.9, -0.2, -0.5, 2e-3, 906},
      {2.0, 1.1, 0.3, 0.7, 1e-3, 907},   {2.5, 1.0, -0.7, 0.2, 5e-4, 908},
      {3.0, 1.3, 0.0, -0.9, 1e-3, 909},  {2.0, 0.8, 0.1, 0.0, 2e-3, 910}};

  int terminal_checks = 0;
  for (const Inst& in : insts) {
    ControlProblem prob;
    prob.cfg = HysteresisConfig{in.r, in.y0};
    prob.grid = TimeGrid::uniform(in.T, 100);
    prob.objective.w_term = 1.0;
    prob.objective.y_T = in.yT;
    prob.objective.nu = in.nu;

    SolveOptions opts;
    opts.seed = in.seed;
    opts.direction_count = 200;
    SolveResult res = solve(prob, opts);

    ck(o, res.checked, "solver must self-certify unconstrained runs");
    ck_ge(o, res.bouligand, -1e-6, "directional derivative over 200 directions");
    ck(o, res.report.pass, "certificate must pass as a whole");
    for (const LineReport& ln : res.report.lines) {
      ck(o, ln.pass, "certificate line: " + ln.name);
      ck_le(o, std::fabs(ln.residual), 1e-6, ln.name.c_str());
    }
    ck_le(o, std::fabs(res.report.qform_residual), 1e-8, "modified-adjoint equivalence");
    if (res.report.terminal_jump_residual) {
      ++terminal_checks;
      ck_le(o, std::fabs(*res.report.terminal_jump_residual), 1e-8,
            "terminal jump identity");
    }

    // rebuild the certificate independently, then corrupt it two ways
    ObjectiveValue ev = objective_eval(prob, res.u_star);
    AdjointPair clean = build_adjoint(ev.grad);
    Rng rng(in.seed * 7 + 1);
    StationaritySamples extra;
    for (int q = 0; q < 6; ++q) {
      PLFunction h = random_pl(rng, prob.grid, 1.0);
      extra.hs.push_back(h);
      extra.cone_zs.push_back(dirdiff_vi(res.u_star, h, prob.cfg).eta);
      extra.reg_zs.push_back(random_regulated(rng, ev.sol.grid(), 1.0, 0.3));
    }
    ck(o, check_strong_stationarity(ev.sol, prob.cfg, clean, ev.grad, extra).pass,
       "rebuilt certificate must pass");

    AdjointPair bent = clean;  // +0.1 on one interior interval of the adjoint
    {
      std::vector<double> l = bent.p.left(), v = bent.p.value(), r = bent.p.right();
      std::size_t k = ev.sol.grid().size() / 2;
      r[k] += 0.1;
      l[k + 1] += 0.1;
      v[k + 1] += 0.1;
      bent.p = GridRegulated(bent.p.grid(), std::move(l), std::move(v), std::move(r));
    }
    ck(o, !check_strong_stationarity(ev.sol, prob.cfg, bent, ev.grad, extra).pass,
       "shifted adjoint must be detected");

    AdjointPair neg = clean;  // one multiplier atom with the forbidden sign
    neg.mu.atoms[ev.sol.grid().size() / 3] -= 0.25;
    ck(o, !check_strong_stationarity(ev.sol, prob.cfg, neg, ev.grad, extra).pass,
       "negative multiplier atom must be detected");
  }
  ck(o, terminal_checks >= 8,
     strf("terminal time inactive in only %d of 10 runs", terminal_checks));
  return o;
}

}  // namespace

int main() {
  Harness H;
  H.run("Stieltjes identities and the independent refinement oracle", 10.0,
        check_integral_identities);
  H.run("stop operator: tracking, stability, order, variational inequality", 30.0,
        check_stop_operator);
  H.run("bounded-variation counterexample table", 5.0, check_counterexample);
  H.run("directional derivative: quotients, jumps, variation, inequality", 60.0,
        check_directional_derivative);
  H.run("radial directions move the state linearly", 10.0, check_radial_directions);
  H.run("two-level approximation of reduced-cone directions", 60.0,
        check_two_level_approximation);
  H.run("polar probes produce no response outside their window", 10.0, check_polar_probes);
  H.run("strong stationarity certificates at solver output", 300.0,
        check_stationarity_certificates);

  if (H.failures == 0)
    std::printf("acceptance: all 8 checks passed\n");
  else
    std::printf("acceptance: %d of 8 checks FAILED\n", H.failures);
  return H.failures == 0 ? 0 : 1;
}
