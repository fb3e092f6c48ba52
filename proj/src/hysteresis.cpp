#include "hysterix/hysteresis.hpp"

#include <cmath>
#include <stdexcept>

#include "hysterix/ksint.hpp"

namespace hysterix {

StopSolution stop(const PLFunction& u, const HysteresisConfig& cfg) {
  cfg.validate();
  const TimeGrid& g = u.grid();
  std::vector<double> nodes, yv;
  nodes.reserve(g.size() + 8);
  yv.reserve(g.size() + 8);
  nodes.push_back(g[0]);
  yv.push_back(cfg.y0);

  // Anchor of the current unclamped stretch: y(t) = ya + u(t) - ua there.
  // It is reset to the exact bound at every clamping event, which keeps
  // node values exact up to one rounding instead of an accumulated sum.
  double ya = cfg.y0, ua = u.value(0);
  double ycur = cfg.y0;
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    double t0 = g[k], t1 = g[k + 1];
    double u0 = u.value(k), u1 = u.value(k + 1);
    double du = u1 - u0;
    double cand = ya + (u1 - ua);
    double ynext;
    if (cand > cfg.r) {
      if (ycur < cfg.r && du > 0.0) {
        double ts = t0 + (t1 - t0) * ((cfg.r - ycur) / du);
        if (ts > t0 && ts < t1) {
          nodes.push_back(ts);
          yv.push_back(cfg.r);
        }
      }
      ynext = cfg.r;
      ya = cfg.r;
      ua = u1;
    } else if (cand < -cfg.r) {
      if (ycur > -cfg.r && du < 0.0) {
        double ts = t0 + (t1 - t0) * ((-cfg.r - ycur) / du);
        if (ts > t0 && ts < t1) {
          nodes.push_back(ts);
          yv.push_back(-cfg.r);
        }
      }
      ynext = -cfg.r;
      ya = -cfg.r;
      ua = u1;
    } else {
      ynext = cand;
    }
    nodes.push_back(t1);
    yv.push_back(ynext);
    ycur = ynext;
  }

  TimeGrid rg(std::move(nodes));
  PLFunction y(rg, std::move(yv));
  PLFunction ur = u.on_grid(rg);
  std::vector<double> wv(rg.size());
  for (std::size_t k = 0; k < rg.size(); ++k) wv[k] = y.value(k) - ur.value(k);
  return StopSolution{std::move(y), PLFunction(rg, std::move(wv))};
}

PLFunction play(const PLFunction& u, const HysteresisConfig& cfg) {
  StopSolution s = stop(u, cfg);
  return scale(s.w, -1.0);  // u - y = -(y - u)
}

RegimeClassification classify_regimes(const StopSolution& sol, const HysteresisConfig& cfg) {
  cfg.validate();
  const TimeGrid& g = sol.grid();
  std::size_t n = g.size();
  RegimeClassification c;
  c.grid = g;
  c.tol_act = kTolActRel * cfg.r;
  c.tol_const = kTolConstRel * (1.0 + sol.w.total_variation());
  c.node.resize(n);
  c.interval.resize(n - 1);
  c.boundary_margin.resize(n);
  c.constancy_gap.resize(n, 0.0);
  c.unstable.assign(n, 0);

  const auto& y = sol.y.values();
  const auto& w = sol.w.values();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double gap = std::fabs(w[k + 1] - w[k]);
    bool hi = std::fabs(y[k] - cfg.r) <= c.tol_act && std::fabs(y[k + 1] - cfg.r) <= c.tol_act;
    bool lo = std::fabs(y[k] + cfg.r) <= c.tol_act && std::fabs(y[k + 1] + cfg.r) <= c.tol_act;
    if (hi)
      c.interval[k] = gap <= c.tol_const ? Regime::BiactivePlus : Regime::StrictlyActive;
    else if (lo)
      c.interval[k] = gap <= c.tol_const ? Regime::BiactiveMinus : Regime::StrictlyActive;
    else
      c.interval[k] = Regime::Inactive;
  }
  for (std::size_t k = 0; k < n; ++k) {
    double margin = cfg.r - std::fabs(y[k]);
    c.boundary_margin[k] = margin;
    double gap = (k + 1 < n) ? std::fabs(w[k + 1] - w[k]) : 0.0;
    c.constancy_gap[k] = gap;
    if (margin > c.tol_act) {
      c.node[k] = Regime::Inactive;
    } else if (k + 1 == n) {
      // final time: biactive by convention when on the boundary
      c.node[k] = y[k] > 0.0 ? Regime::BiactivePlus : Regime::BiactiveMinus;
    } else if (gap <= c.tol_const) {
      c.node[k] = y[k] > 0.0 ? Regime::BiactivePlus : Regime::BiactiveMinus;
    } else {
      c.node[k] = Regime::StrictlyActive;
    }
    bool near_act = margin > c.tol_act && margin <= 10.0 * c.tol_act;
    bool near_const = margin <= c.tol_act && gap > 0.1 * c.tol_const && gap <= 10.0 * c.tol_const;
    c.unstable[k] = (near_act || near_const) ? 1 : 0;
  }
  return c;
}

VIResidual vi_residual(const StopSolution& sol, std::span<const GridRegulated> test_fns,
                       double a, double b, const HysteresisConfig& cfg, Exec exec) {
  cfg.validate();
  for (const auto& v : test_fns)
    if (v.sup_norm() > cfg.r + kTolEq)
      throw std::invalid_argument("vi_residual: test function leaves [-r, r]");
  GridRegulated y = GridRegulated::from_pl(sol.y);
  GridRegulated w = GridRegulated::from_pl(sol.w);
  std::vector<double> vals(test_fns.size());
  parallel_for(exec, test_fns.size(), [&](std::size_t i) {
    vals[i] = ks_integrate(sub(test_fns[i], y), w, a, b);
  });
  VIResidual r;
  r.min_value = vals.empty() ? 0.0 : vals[0];
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] <= r.min_value) {
      r.min_value = vals[i];
      r.argmin = i;
    }
  }
  return r;
}

}  // namespace hysterix
