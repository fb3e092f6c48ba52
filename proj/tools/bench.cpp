// Compares the OpenMP batch kernels against the serial reference on the same
// inputs. Results must match bit for bit; timings show the available speedup
// (about 1.0x on a single-core machine).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <vector>

#include "hysterix/control.hpp"
#include "hysterix/hysteresis.hpp"
#include "hysterix/parallel.hpp"
#include "hysterix/sensitivity.hpp"
#include "hysterix/signals.hpp"
#include "hysterix/stationarity.hpp"

using namespace hysterix;

namespace {

template <class F>
double time_ms(F&& fn, int reps) {
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-28s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   %s\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "bitwise identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", max_threads());
  Rng rng(2024);
  HysteresisConfig cfg{1.0, 0.0};
  const int reps = 5;
  bool all_identical = true;

  {
    TimeGrid g = random_grid(rng, 8.0, 20000, 0.3);
    PLFunction u = random_walk_pl(rng, g, 0.0, 0.4);
    StopSolution sol = stop(u, cfg);
    std::vector<GridRegulated> fams;
    for (int i = 0; i < 48; ++i) {
      PLFunction v = random_pl(rng, g, cfg.r);
      std::vector<double> vv = v.values();
      for (double& x : vv) x = std::clamp(x, -cfg.r, cfg.r);
      fams.push_back(GridRegulated::from_pl(PLFunction(g, std::move(vv))));
    }
    VIResidual rs, rp;
    double ts = time_ms([&] { rs = vi_residual(sol, fams, 0.0, 8.0, cfg, Exec::Serial); }, reps);
    double tp = time_ms([&] { rp = vi_residual(sol, fams, 0.0, 8.0, cfg, Exec::Parallel); }, reps);
    bool same = rs.min_value == rp.min_value && rs.argmin == rp.argmin;
    all_identical = all_identical && same;
    report("variational inequality", ts, tp, same);
  }

  {
    TimeGrid g = random_grid(rng, 6.0, 4000, 0.3);
    PLFunction u = random_walk_pl(rng, g, 0.0, 0.3);
    PLFunction h = random_pl(rng, g, 1.0);
    std::vector<double> alphas{1e-6, 2e-6, 5e-6, 1e-5, 5e-5, 1e-4};
    FDQuotients qs, qp;
    double ts = time_ms([&] { qs = dirdiff_fd(u, h, cfg, alphas, Exec::Serial); }, reps);
    double tp = time_ms([&] { qp = dirdiff_fd(u, h, cfg, alphas, Exec::Parallel); }, reps);
    bool same = qs.limit == qp.limit && qs.q == qp.q;
    all_identical = all_identical && same;
    report("finite difference sweep", ts, tp, same);
  }

  {
    TimeGrid g = TimeGrid::uniform(4.0, 2000);
    PLFunction u = random_walk_pl(rng, g, 0.0, 0.25);
    HysteresisConfig c2{1.0, 0.5};
    TrackingObjective obj;
    obj.w_term = 1.0;
    obj.nu = 1e-3;
    ControlProblem prob;
    prob.cfg = c2;
    prob.grid = g;
    prob.objective = obj;
    ObjectiveValue ev = objective_eval(prob, u);
    std::vector<PLFunction> dirs;
    for (int i = 0; i < 64; ++i) dirs.push_back(random_pl(rng, g, 1.0));
    BouligandResult bs, bp;
    double ts =
        time_ms([&] { bs = bouligand_residual(u, ev.grad, dirs, c2, Exec::Serial); }, reps);
    double tp =
        time_ms([&] { bp = bouligand_residual(u, ev.grad, dirs, c2, Exec::Parallel); }, reps);
    bool same = bs.min_value == bp.min_value && bs.values == bp.values;
    all_identical = all_identical && same;
    report("descent direction batch", ts, tp, same);
  }

  std::printf("\n%s\n", all_identical ? "all kernels agree with the serial reference"
                                      : "kernel outputs DIVERGED from the serial reference");
  return all_identical ? 0 : 1;
}
