#include "hysterix/signals.hpp"

#include <cmath>

#include "hysterix/sensitivity.hpp"

namespace hysterix {

double exp_reciprocal(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double smooth_step01(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double a = exp_reciprocal(x);
  double b = exp_reciprocal(1.0 - x);
  return a / (a + b);
}

double rising_unit_step(double x) { return smooth_step01(x + 1.0); }

double unit_bump02(double x) {
  double d = x - 1.0;
  if (d <= -1.0 || d >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - d * d));
}

double bump2(double t) { return 2.0 * unit_bump02(t); }

PLFunction sample_pl(const TimeGrid& grid, double (*fn)(double)) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) v[k] = fn(grid[k]);
  return PLFunction(grid, std::move(v));
}

PLFunction sample_sin(const TimeGrid& grid) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) v[k] = std::sin(grid[k]);
  return PLFunction(grid, std::move(v));
}

TimeGrid random_grid(Rng& rng, double T, std::size_t intervals, double jitter) {
  std::uniform_real_distribution<double> U(-0.5 * jitter, 0.5 * jitter);
  std::vector<double> n(intervals + 1);
  double h = T / static_cast<double>(intervals);
  for (std::size_t k = 0; k <= intervals; ++k) {
    n[k] = h * static_cast<double>(k);
    if (k > 0 && k < intervals) n[k] += h * U(rng);
  }
  n.front() = 0.0;
  n.back() = T;
  return TimeGrid(std::move(n));
}

PLFunction random_pl(Rng& rng, const TimeGrid& grid, double amp) {
  std::uniform_real_distribution<double> U(-amp, amp);
  std::vector<double> v(grid.size());
  for (double& x : v) x = U(rng);
  return PLFunction(grid, std::move(v));
}

PLFunction random_walk_pl(Rng& rng, const TimeGrid& grid, double start, double step) {
  std::uniform_real_distribution<double> U(-step, step);
  std::vector<double> v(grid.size());
  v[0] = start;
  for (std::size_t k = 1; k < grid.size(); ++k) v[k] = v[k - 1] + U(rng);
  return PLFunction(grid, std::move(v));
}

GridRegulated random_regulated(Rng& rng, const TimeGrid& grid, double amp, double jump_prob) {
  std::uniform_real_distribution<double> U(-amp, amp);
  std::uniform_real_distribution<double> P(0.0, 1.0);
  std::size_t n = grid.size();
  std::vector<double> l(n), v(n), r(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (P(rng) < jump_prob) {
      l[k] = U(rng);
      v[k] = U(rng);
      r[k] = U(rng);
    } else {
      l[k] = v[k] = r[k] = U(rng);
    }
  }
  return GridRegulated(grid, std::move(l), std::move(v), std::move(r));
}

GridRegulated random_rc_step(Rng& rng, const TimeGrid& grid, double amp) {
  std::uniform_real_distribution<double> U(-amp, amp);
  std::size_t n = grid.size();
  std::vector<double> l(n), v(n), r(n);
  double cur = U(rng);
  for (std::size_t k = 0; k < n; ++k) {
    l[k] = cur;
    cur = U(rng);
    v[k] = r[k] = cur;
  }
  return GridRegulated(grid, std::move(l), std::move(v), std::move(r));
}

GridRegulated random_node_supported(Rng& rng, const TimeGrid& grid, double amp) {
  std::uniform_real_distribution<double> U(-amp, amp);
  std::uniform_real_distribution<double> P(0.0, 1.0);
  std::size_t n = grid.size();
  std::vector<double> l(n, 0.0), v(n, 0.0), r(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k)
    if (P(rng) < 0.5) v[k] = U(rng);
  return GridRegulated(grid, std::move(l), std::move(v), std::move(r));
}

PLFunction random_reparam(Rng& rng, const TimeGrid& grid) {
  std::uniform_real_distribution<double> U(0.05, 1.0);
  std::size_t n = grid.size();
  std::vector<double> inc(n, 0.0), v(n);
  double total = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    inc[k] = U(rng);
    total += inc[k];
  }
  double T = grid.duration();
  double acc = 0.0;
  v[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    acc += inc[k];
    v[k] = T * (acc / total);
  }
  v[n - 1] = T;
  return PLFunction(grid, std::move(v));
}

GridRegulated random_cone_feasible(Rng& rng, const RegimeClassification& cls, double amp,
                                   bool with_jumps) {
  std::uniform_real_distribution<double> U(-amp, amp);
  std::uniform_real_distribution<double> P(0.0, 1.0);
  const TimeGrid& g = cls.grid;
  std::size_t n = g.size();
  std::vector<double> l(n), v(n), r(n);
  // node values first, projected into the node cones; zero at time 0
  std::vector<double> base(n);
  for (std::size_t k = 0; k < n; ++k)
    base[k] = cone_project(cone_of(cls.node[k]), k == 0 ? 0.0 : U(rng));
  base[0] = 0.0;
  // interval cones constrain the linear interiors; zero out values adjacent
  // to strictly active intervals so the segment stays inside
  for (std::size_t k = 0; k + 1 < n; ++k) {
    Cone ci = cone_of(cls.interval[k]);
    if (ci == Cone::Zero) {
      base[k] = 0.0;
      base[k + 1] = 0.0;
    } else if (ci != Cone::Free) {
      base[k] = cone_project(ci, base[k]);
      base[k + 1] = cone_project(ci, base[k + 1]);
    }
  }
  for (std::size_t k = 0; k < n; ++k) l[k] = v[k] = r[k] = base[k];
  if (with_jumps) {
    // a jump of a reduced-cone member must land at zero: keep the left limit,
    // restart the right side at 0
    for (std::size_t k = 1; k + 1 < n; ++k) {
      bool left_zero_needed = cone_of(cls.interval[k - 1]) == Cone::Zero;
      if (!left_zero_needed && P(rng) < 0.15 && std::fabs(base[k]) > 0.0) {
        v[k] = 0.0;
        r[k] = 0.0;
        // the following interior now ramps from 0 to base[k+1], still inside
        // the interval cone because cones are convex and contain 0
      }
    }
    // restore consistency of interiors: left limits follow the previous right
    for (std::size_t k = 0; k + 1 < n; ++k) {
      double a = r[k], b = l[k + 1];
      Cone ci = cone_of(cls.interval[k]);
      if (ci == Cone::Zero && (a != 0.0 || b != 0.0)) {
        r[k] = 0.0;
        l[k + 1] = 0.0;
      }
    }
  }
  return GridRegulated(g, std::move(l), std::move(v), std::move(r));
}

PLFunction random_cone_feasible_pl(Rng& rng, const RegimeClassification& cls, double amp) {
  std::uniform_real_distribution<double> U(-amp, amp);
  const TimeGrid& g = cls.grid;
  std::size_t n = g.size();
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k)
    v[k] = cone_project(cone_of(cls.node[k]), k == 0 ? 0.0 : U(rng));
  v[0] = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    Cone ci = cone_of(cls.interval[k]);
    if (ci == Cone::Zero) {
      v[k] = 0.0;
      v[k + 1] = 0.0;
    } else if (ci != Cone::Free) {
      v[k] = cone_project(ci, v[k]);
      v[k + 1] = cone_project(ci, v[k + 1]);
    }
  }
  return PLFunction(g, std::move(v));
}

}  // namespace hysterix
