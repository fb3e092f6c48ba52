#pragma once

#include <span>
#include <vector>

#include "hysterix/constants.hpp"
#include "hysterix/grid.hpp"
#include "hysterix/parallel.hpp"

namespace hysterix {

// Node and interval classification of a trajectory relative to the band
// [-r, r]. A boundary point is Biactive when y - u stays constant on a right
// neighborhood (the trajectory can leave the bound freely) and StrictlyActive
// when the input keeps pressing into the bound. The final time T is biactive
// by convention whenever |y(T)| = r.
enum class Regime { Inactive, BiactivePlus, BiactiveMinus, StrictlyActive };

// Exact trajectory of the scalar stop operator for piecewise linear input.
// The grid is the input grid enriched with every boundary hitting time, so y
// is piecewise linear on it with clamped values exactly +-r. w = y - u.
struct StopSolution {
  PLFunction y;
  PLFunction w;
  const TimeGrid& grid() const { return y.grid(); }
  StopSolution on_grid(const TimeGrid& finer) const {
    return StopSolution{y.on_grid(finer), w.on_grid(finer)};
  }
};

StopSolution stop(const PLFunction& u, const HysteresisConfig& cfg);
// play(u) = u - stop(u)
PLFunction play(const PLFunction& u, const HysteresisConfig& cfg);

struct RegimeClassification {
  TimeGrid grid;
  std::vector<Regime> node;       // size == grid.size()
  std::vector<Regime> interval;   // size == grid.intervals(), regime on the open interval
  std::vector<double> boundary_margin;  // per node: r - |y|
  std::vector<double> constancy_gap;    // per node: |w(t_{k+1}) - w(t_k)| (0 at T)
  std::vector<char> unstable;     // per node: margins within a decade of the thresholds
  double tol_act = 0.0;
  double tol_const = 0.0;
};

RegimeClassification classify_regimes(const StopSolution& sol, const HysteresisConfig& cfg);

struct VIResidual {
  double min_value = 0.0;   // smallest integral over the family
  std::size_t argmin = 0;   // index of the minimizing test function
};

// min over v of int_a^b (v - y) d(y - u); every test function must stay
// inside [-r, r] up to kTolEq, otherwise the call is rejected.
VIResidual vi_residual(const StopSolution& sol, std::span<const GridRegulated> test_fns,
                       double a, double b, const HysteresisConfig& cfg,
                       Exec exec = Exec::Parallel);

}  // namespace hysterix
