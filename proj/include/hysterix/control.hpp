#pragma once

#include <span>
#include <string>
#include <vector>

#include "hysterix/stationarity.hpp"

namespace hysterix {

enum class AdmissibleKind { Unconstrained, Box };

// Quadratic tracking objective
//   J(u) = w_track/2 int (y - y_d)^2 + w_term/2 (y(T) - y_T)^2
//        + nu/2 (int u^2 + int u'^2),   y = stop(u).
struct TrackingObjective {
  PLFunction y_d;        // may be left empty when w_track == 0
  double y_T = 0.0;
  double w_track = 0.0;
  double w_term = 1.0;
  double nu = 1e-3;
};

struct ControlProblem {
  HysteresisConfig cfg;
  TimeGrid grid;                 // control discretization
  TrackingObjective objective;
  AdmissibleKind admissible = AdmissibleKind::Unconstrained;
  PLFunction lower, upper;       // box bounds, used when admissible == Box
  PLFunction u0;                 // optional initial iterate (empty = zero)
  void validate() const;
};

struct ObjectiveValue {
  double j = 0.0;
  ObjectiveGradient grad;
  StopSolution sol;
};

// Exact objective and gradient data at u (u must live on the problem grid).
// The control-space pairing is the trapezoidal mass plus the piecewise
// linear stiffness, so d3 = nu (W u + K u) node by node.
ObjectiveValue objective_eval(const ControlProblem& prob, const PLFunction& u);

struct SolveOptions {
  int max_iters = 300;                         // per smoothing stage
  std::vector<double> sigmas = {1e-2, 1e-3, 1e-4, 1e-5};
  double grad_tol = 1e-11;
  int direction_count = 200;                   // certification family size
  unsigned long long seed = 17;
  bool polish = true;                          // exact pattern solve at the end
  bool check = true;                           // run the stationarity checker
};

struct SolveResult {
  PLFunction u_star;
  std::vector<double> objective_trace;         // true objective per accepted step
  std::vector<std::size_t> stage_starts;       // trace indices where a stage began
  double bouligand = 0.0;                      // min directional derivative
  StationarityReport report;
  bool checked = false;                        // report filled (unconstrained only)
  std::string note;                            // non-fatal diagnostics
};

SolveResult solve(const ControlProblem& prob, const SolveOptions& opts = {});

// C1 ramp used by the solver surrogate: clamp(x, -r, r) smoothed over a
// width sigma, strictly inside (-r, r), monotone, and within 2 sigma ln 2 of
// the sharp clamp.
double smooth_clamp(double x, double r, double sigma);

// Node recursion y_k = smooth_clamp(y_{k-1} + u_k - u_{k-1}); converges to
// the exact stop values as sigma -> 0 at fixed u.
PLFunction smooth_stop(const PLFunction& u, const HysteresisConfig& cfg, double sigma);

struct CounterexampleRow {
  int n = 0;
  double bv_u = 0.0;       // |u(0)| + var(u)
  double bv_y = 0.0;       // |y(0)| + var(y)
  std::vector<double> probes;  // y(t) at the probe times
};

struct CounterexampleTable {
  std::vector<double> probe_times;
  std::vector<CounterexampleRow> rows;
  std::vector<double> zero_probes;  // response to the zero input at the same times
};

// Fixed demonstration: r = y0 = 1, T = 2, input u_n(t) = bump2(n t). The BV
// norms stay at 4 and 3 while the pointwise values converge to -1 away from
// t = 0, so the response does not converge in any norm that sees variation.
CounterexampleTable counterexample_demo(std::span<const int> n_list);

}  // namespace hysterix
