#include "hysterix/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hysterix/ksint.hpp"

namespace hysterix {

double cone_project(Cone c, double x) {
  switch (c) {
    case Cone::Free: return x;
    case Cone::NonPos: return std::min(0.0, x);
    case Cone::NonNeg: return std::max(0.0, x);
    case Cone::Zero: return 0.0;
  }
  return x;
}

bool cone_contains(Cone c, double x, double tol) {
  switch (c) {
    case Cone::Free: return true;
    case Cone::NonPos: return x <= tol;
    case Cone::NonNeg: return x >= -tol;
    case Cone::Zero: return std::fabs(x) <= tol;
  }
  return false;
}

Cone cone_of(Regime r) {
  switch (r) {
    case Regime::Inactive: return Cone::Free;
    case Regime::BiactivePlus: return Cone::NonPos;
    case Regime::BiactiveMinus: return Cone::NonNeg;
    case Regime::StrictlyActive: return Cone::Zero;
  }
  return Cone::Free;
}

bool polar_contains(Regime r, double c, double tol) {
  switch (r) {
    case Regime::Inactive: return std::fabs(c) <= tol;
    case Regime::BiactivePlus: return c >= -tol;
    case Regime::BiactiveMinus: return c <= tol;
    case Regime::StrictlyActive: return true;
  }
  return false;
}

ConeSpec ConeSpec::from(const RegimeClassification& cls) {
  ConeSpec s;
  s.grid = cls.grid;
  s.node.resize(cls.node.size());
  s.interval.resize(cls.interval.size());
  for (std::size_t k = 0; k < cls.node.size(); ++k) s.node[k] = cone_of(cls.node[k]);
  for (std::size_t k = 0; k < cls.interval.size(); ++k) s.interval[k] = cone_of(cls.interval[k]);
  return s;
}

DerivativeResult dirdiff_vi(const PLFunction& u, const PLFunction& h,
                            const HysteresisConfig& cfg) {
  StopSolution sol = stop(u, cfg);
  TimeGrid g = sol.grid().merged_with(h.grid());
  StopSolution rsol = sol.on_grid(g);
  RegimeClassification cls = classify_regimes(rsol, cfg);
  ConeSpec cones = ConeSpec::from(cls);
  PLFunction hh = h.on_grid(g);

  std::vector<double> nodes, lv, vv, rv;
  nodes.reserve(g.size() + 8);
  auto push = [&](double t, double l, double v, double r) {
    nodes.push_back(t);
    lv.push_back(l);
    vv.push_back(v);
    rv.push_back(r);
  };
  double eta = 0.0;
  push(g[0], 0.0, 0.0, 0.0);
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    double dh = hh.value(k + 1) - hh.value(k);
    Cone ci = cones.interval[k];
    double raw = eta + dh;
    double end;  // left limit at t_{k+1}
    switch (ci) {
      case Cone::Free:
        end = raw;
        break;
      case Cone::Zero:
        end = 0.0;
        break;
      case Cone::NonPos:
        end = std::min(0.0, raw);
        if (eta < 0.0 && raw > 0.0) {
          // the state hits the cone boundary inside the interval; h is linear
          // there, so the crossing time is exact
          double lam = -eta / dh;
          double ts = g[k] + lam * (g[k + 1] - g[k]);
          if (ts > g[k] && ts < g[k + 1]) push(ts, 0.0, 0.0, 0.0);
        }
        break;
      case Cone::NonNeg:
        end = std::max(0.0, raw);
        if (eta > 0.0 && raw < 0.0) {
          double lam = -eta / dh;
          double ts = g[k] + lam * (g[k + 1] - g[k]);
          if (ts > g[k] && ts < g[k + 1]) push(ts, 0.0, 0.0, 0.0);
        }
        break;
    }
    double next = cone_project(cones.node[k + 1], end);
    push(g[k + 1], end, next, next);
    eta = next;
  }

  DerivativeResult res;
  res.eta = GridRegulated(TimeGrid(std::move(nodes)), std::move(lv), std::move(vv), std::move(rv));
  res.cones = std::move(cones);
  res.regimes = std::move(cls);
  return res;
}

FDQuotients dirdiff_fd(const PLFunction& u, const PLFunction& h, const HysteresisConfig& cfg,
                       std::span<const double> alphas, Exec exec) {
  if (alphas.empty()) throw std::invalid_argument("dirdiff_fd: need at least one alpha");
  for (double a : alphas)
    if (!(a > 0.0)) throw std::invalid_argument("dirdiff_fd: alphas must be positive");
  StopSolution sol = stop(u, cfg);
  TimeGrid g = sol.grid().merged_with(h.grid());
  PLFunction y = sol.y.on_grid(g);

  FDQuotients out;
  out.grid = g;
  out.alphas.assign(alphas.begin(), alphas.end());
  out.q.resize(alphas.size());
  parallel_for(exec, alphas.size(), [&](std::size_t i) {
    double a = alphas[i];
    StopSolution pert = stop(add(u, scale(h, a)), cfg);
    std::vector<double> q(g.size());
    for (std::size_t k = 0; k < g.size(); ++k)
      q[k] = (pert.y.eval(g[k]) - y.value(k)) / a;
    out.q[i] = std::move(q);
  });

  // order of alphas by size; the two smallest drive the reported estimate
  std::vector<std::size_t> idx(alphas.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return alphas[a] < alphas[b];
  });
  std::size_t i0 = idx[0];
  std::size_t i1 = idx.size() > 1 ? idx[1] : idx[0];
  out.limit = out.q[i0];
  out.stabilization.resize(g.size());
  out.richardson_slope.resize(g.size());
  double da = out.alphas[i1] - out.alphas[i0];
  for (std::size_t k = 0; k < g.size(); ++k) {
    out.stabilization[k] = std::fabs(out.q[i0][k] - out.q[i1][k]);
    out.richardson_slope[k] = da != 0.0 ? (out.q[i1][k] - out.q[i0][k]) / da : 0.0;
  }
  return out;
}

DerivativeVIResidual derivative_vi_residual(const DerivativeResult& d, const PLFunction& h,
                                            std::span<const GridRegulated> zs, double s,
                                            Exec exec) {
  const TimeGrid& g = d.cones.grid;
  for (const auto& z : zs) {
    GridRegulated zr = z.on_grid(z.grid().merged_with(g));
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::size_t j = zr.grid().find_node(g[k]);
      if (!cone_contains(d.cones.node[k], zr.value()[j], kTolEq))
        throw std::invalid_argument("derivative_vi_residual: z violates a node cone");
    }
  }
  GridRegulated integrator = sub(d.eta, GridRegulated::from_pl(h));
  std::vector<double> vals(zs.size());
  parallel_for(exec, zs.size(), [&](std::size_t i) {
    vals[i] = ks_integrate(sub(zs[i], d.eta), integrator, 0.0, s);
  });
  DerivativeVIResidual r;
  r.orthogonality = ks_integrate(d.eta, integrator, 0.0, s);
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
