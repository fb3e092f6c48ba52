#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <vector>

#include "hysterix/control.hpp"
#include "hysterix/hysteresis.hpp"
#include "hysterix/parallel.hpp"
#include "hysterix/sensitivity.hpp"
#include "hysterix/signals.hpp"
#include "hysterix/stationarity.hpp"

using namespace hysterix;

TEST_CASE("parallel loop covers every index exactly once") {
  CHECK(max_threads() >= 1);
  for (Exec mode : {Exec::Serial, Exec::Parallel}) {
    std::vector<int> hits(1000, 0);
    parallel_for(mode, hits.size(), [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);
    // empty and single-element ranges
    parallel_for(mode, 0, [&](std::size_t) { FAIL("must not be called"); });
    int one = 0;
    parallel_for(mode, 1, [&](std::size_t) { ++one; });
    CHECK(one == 1);
  }
}

TEST_CASE("batched kernels agree bitwise with the serial reference") {
  Rng rng(6);
  TimeGrid g = random_grid(rng, 3.0, 200, 0.3);
  PLFunction u = random_walk_pl(rng, g, 0.0, 0.5);
  HysteresisConfig cfg{1.0, 0.0};
  StopSolution sol = stop(u, cfg);

  std::vector<GridRegulated> fam;
  for (int i = 0; i < 16; ++i) {
    PLFunction v = random_pl(rng, g, cfg.r);
    std::vector<double> vv = v.values();
    for (double& x : vv) x = std::clamp(x, -cfg.r, cfg.r);
    fam.push_back(GridRegulated::from_pl(PLFunction(g, std::move(vv))));
  }
  VIResidual vs = vi_residual(sol, fam, 0.0, 3.0, cfg, Exec::Serial);
  VIResidual vp = vi_residual(sol, fam, 0.0, 3.0, cfg, Exec::Parallel);
  CHECK(vs.min_value == vp.min_value);
  CHECK(vs.argmin == vp.argmin);

  PLFunction h = random_pl(rng, g, 1.0);
  std::vector<double> alphas{1e-6, 1e-5, 1e-4};
  FDQuotients fs = dirdiff_fd(u, h, cfg, alphas, Exec::Serial);
  FDQuotients fp = dirdiff_fd(u, h, cfg, alphas, Exec::Parallel);
  CHECK(fs.q == fp.q);
  CHECK(fs.limit == fp.limit);
  CHECK(fs.stabilization == fp.stabilization);

  ControlProblem prob;
  prob.cfg = cfg;
  prob.grid = g;
  prob.objective.w_term = 1.0;
  prob.objective.y_T = 0.4;
  prob.objective.nu = 1e-3;
  ObjectiveValue ev = objective_eval(prob, u);
  std::vector<PLFunction> dirs;
  for (int i = 0; i < 24; ++i) dirs.push_back(random_pl(rng, g, 1.0));
  BouligandResult bs = bouligand_residual(u, ev.grad, dirs, cfg, Exec::Serial);
  BouligandResult bp = bouligand_residual(u, ev.grad, dirs, cfg, Exec::Parallel);
  CHECK(bs.values == bp.values);
  CHECK(bs.min_value == bp.min_value);
  CHECK(bs.argmin == bp.argmin);

  std::vector<GridRegulated> zs;
  DerivativeResult d = dirdiff_vi(u, h, cfg);
  zs.push_back(d.eta);
  for (int i = 0; i < 8; ++i) zs.push_back(random_cone_feasible(rng, d.regimes, 1.0, i % 2));
  DerivativeVIResidual ds = derivative_vi_residual(d, h, zs, 3.0, Exec::Serial);
  DerivativeVIResidual dp = derivative_vi_residual(d, h, zs, 3.0, Exec::Parallel);
  CHECK(ds.min_value == dp.min_value);
  CHECK(ds.argmin == dp.argmin);
  CHECK(ds.orthogonality == dp.orthogonality);
}

TEST_CASE("stationarity check is execution-mode invariant") {
  ControlProblem prob;
  prob.cfg = HysteresisConfig{1.0, 0.0};
  prob.grid = TimeGrid::uniform(2.0, 40);
  prob.objective.w_term = 1.0;
  prob.objective.y_T = 0.45;
  prob.objective.nu = 1e-3;
  SolveOptions opts;
  opts.seed = 51;
  opts.check = false;
  SolveResult res = solve(prob, opts);
  ObjectiveValue ev = objective_eval(prob, res.u_star);
  AdjointPair pair = build_adjoint(ev.grad);

  Rng rng(3);
  StationaritySamples extra;
  for (int i = 0; i < 5; ++i) {
    PLFunction h = random_pl(rng, prob.grid, 1.0);
    extra.hs.push_back(h);
    extra.cone_zs.push_back(dirdiff_vi(res.u_star, h, prob.cfg).eta);
  }
  StationarityReport rs =
      check_strong_stationarity(ev.sol, prob.cfg, pair, ev.grad, extra, 1e-6, Exec::Serial);
  StationarityReport rp =
      check_strong_stationarity(ev.sol, prob.cfg, pair, ev.grad, extra, 1e-6, Exec::Parallel);
  CHECK(rs.pass == rp.pass);
  REQUIRE(rs.lines.size() == rp.lines.size());
  for (std::size_t i = 0; i < rs.lines.size(); ++i)
    CHECK(rs.lines[i].residual == rp.lines[i].residual);
}
