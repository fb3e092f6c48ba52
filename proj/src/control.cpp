#include "hysterix/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "hysterix/ksint.hpp"
#include "hysterix/signals.hpp"

namespace hysterix {

namespace {

// nu * (trapezoidal mass + piecewise linear stiffness), tridiagonal
struct Tri {
  std::vector<double> lo, di, up;
};

Tri h1_operator(const TimeGrid& g, double nu) {
  std::size_t n = g.size();
  Tri m;
  m.lo.assign(n, 0.0);
  m.di.assign(n, 0.0);
  m.up.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double h = g[k + 1] - g[k];
    m.di[k] += nu * (0.5 * h + 1.0 / h);
    m.di[k + 1] += nu * (0.5 * h + 1.0 / h);
    m.up[k] += nu * (-1.0 / h);
    m.lo[k + 1] += nu * (-1.0 / h);
  }
  return m;
}

std::vector<double> matvec(const Tri& m, const std::vector<double>& x) {
  std::size_t n = x.size();
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    double v = m.di[k] * x[k];
    if (k > 0) v += m.lo[k] * x[k - 1];
    if (k + 1 < n) v += m.up[k] * x[k + 1];
    y[k] = v;
  }
  return y;
}

std::vector<double> tri_solve(const Tri& m, std::vector<double> b) {
  std::size_t n = b.size();
  std::vector<double> c(n, 0.0);
  std::vector<double> d = m.di;
  for (std::size_t k = 1; k < n; ++k) {
    double w = m.lo[k] / d[k - 1];
    d[k] -= w * m.up[k - 1];
    b[k] -= w * b[k - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = b[n - 1] / d[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) x[k] = (b[k] - m.up[k] * x[k + 1]) / d[k];
  (void)c;
  return x;
}

// (M + w q q^T) x = b with M tridiagonal positive definite
std::vector<double> rank1_solve(const Tri& m, double w, const std::vector<double>& q,
                                const std::vector<double>& b) {
  std::vector<double> mb = tri_solve(m, b);
  if (w == 0.0) return mb;
  std::vector<double> mq = tri_solve(m, q);
  double qb = 0.0, qq = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    qb += q[k] * mb[k];
    qq += q[k] * mq[k];
  }
  double f = w * qb / (1.0 + w * qq);
  std::vector<double> x(mb.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = mb[k] - f * mq[k];
  return x;
}

double softplus(double t) {
  if (t > 35.0) return t;
  if (t < -35.0) return std::exp(t);
  return std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

struct SmoothEval {
  double j = 0.0;
  std::vector<double> g;
};

// forward recursion through the C1 ramp plus reverse sweep for the exact
// gradient of the surrogate objective
SmoothEval smooth_objective(const ControlProblem& prob, const std::vector<double>& u,
                            double sigma, const Tri& m, const std::vector<double>& yd) {
  const TimeGrid& g = prob.grid;
  std::size_t n = g.size();
  const TrackingObjective& o = prob.objective;
  double r = prob.cfg.r;

  std::vector<double> y(n), ds(n, 0.0);
  y[0] = prob.cfg.y0;
  for (std::size_t k = 1; k < n; ++k) {
    double x = y[k - 1] + u[k] - u[k - 1];
    y[k] = smooth_clamp(x, r, sigma);
    ds[k] = 1.0 - sigmoid((x - r) / sigma) - sigmoid((-x - r) / sigma);
  }

  SmoothEval out;
  std::vector<double> G(n, 0.0);
  if (o.w_track > 0.0) {
    // exact integral of the piecewise linear error, cell by cell, so the
    // surrogate matches the true tracking term away from band-hitting cells
    for (std::size_t k = 0; k + 1 < n; ++k) {
      double h6 = o.w_track * (g[k + 1] - g[k]) / 6.0;
      double ea = y[k] - yd[k], eb = y[k + 1] - yd[k + 1];
      out.j += h6 * (ea * ea + ea * eb + eb * eb);
      G[k] += h6 * (2.0 * ea + eb);
      G[k + 1] += h6 * (ea + 2.0 * eb);
    }
  }
  double et = y[n - 1] - o.y_T;
  out.j += 0.5 * o.w_term * et * et;
  G[n - 1] += o.w_term * et;

  std::vector<double> a(n + 1, 0.0);
  for (std::size_t k = n - 1; k >= 1; --k) a[k] = (G[k] + a[k + 1]) * ds[k];

  std::vector<double> mu = matvec(m, u);
  out.g.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.j += 0.5 * u[k] * mu[k];
    out.g[k] = mu[k] + a[k] - a[k + 1];
  }
  return out;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

std::vector<PLFunction> sample_directions(const ControlProblem& prob,
                                          const std::vector<double>& u, int count, Rng& rng) {
  const TimeGrid& g = prob.grid;
  std::size_t n = g.size();
  std::vector<PLFunction> dirs;
  dirs.reserve(static_cast<std::size_t>(std::max(count, 0)));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int i = 0; i < count; ++i) {
    PLFunction h;
    switch (i % 5) {
      case 0: h = PLFunction::constant(g, i == 0 ? 1.0 : -1.0); break;
      case 1: h = random_pl(rng, g, 1.0); break;
      case 2: h = random_walk_pl(rng, g, 0.0, 0.5); break;
      case 3: {
        std::vector<double> v(n, 0.0);
        v[pick(rng)] = (i % 2 == 0) ? 1.0 : -1.0;
        h = PLFunction(g, std::move(v));
        break;
      }
      default: h = random_pl(rng, g, 0.25); break;
    }
    if (prob.admissible == AdmissibleKind::Box) {
      std::vector<double> v = h.values();
      double btol = 1e-12 * (1.0 + prob.lower.sup_norm() + prob.upper.sup_norm());
      for (std::size_t k = 0; k < n; ++k) {
        if (u[k] <= prob.lower.value(k) + btol) v[k] = std::max(v[k], 0.0);
        if (u[k] >= prob.upper.value(k) - btol) v[k] = std::min(v[k], 0.0);
      }
      h = PLFunction(g, std::move(v));
    }
    dirs.push_back(std::move(h));
  }
  return dirs;
}

StationaritySamples build_samples(const ObjectiveValue& fin, const PLFunction& u_star,
                                  std::span<const PLFunction> dirs, const HysteresisConfig& cfg,
                                  Rng& rng) {
  StationaritySamples ex;
  std::size_t n_eta = std::min<std::size_t>(dirs.size(), 12);
  std::vector<GridRegulated> etas;
  for (std::size_t i = 0; i < n_eta; ++i)
    etas.push_back(dirdiff_vi(u_star, dirs[i], cfg).eta);
  for (std::size_t i = 0; i < etas.size(); ++i) {
    ex.cone_zs.push_back(etas[i]);
    if (i < 6) ex.reg_zs.push_back(etas[i]);
  }
  const int ilist[] = {4};
  for (std::size_t i = 0; i < std::min<std::size_t>(etas.size(), 4); ++i) {
    PolyhedricApprox pa = polyhedric_approx(etas[i], 8, ilist, fin.sol, cfg);
    ex.cone_zs.push_back(pa.z_j);
  }
  RegimeClassification cls = classify_regimes(fin.sol, cfg);
  for (int i = 0; i < 6; ++i)
    ex.cone_zs.push_back(random_cone_feasible(rng, cls, 1.0, i % 2 == 0));
  for (int i = 0; i < 6; ++i)
    ex.reg_zs.push_back(random_regulated(rng, fin.sol.grid(), 1.0, 0.3));
  for (int i = 0; i < 4; ++i) ex.reg_zs.push_back(random_rc_step(rng, fin.sol.grid(), 1.0));
  for (int i = 0; i < 8; ++i) ex.hs.push_back(random_pl(rng, u_star.grid(), 1.0));
  return ex;
}

}  // namespace

void ControlProblem::validate() const {
  cfg.validate();
  if (grid.size() < 2)
    throw std::invalid_argument("ControlProblem: grid needs at least one interval");
  if (!(objective.nu > 0.0)) throw std::invalid_argument("ControlProblem: nu must be positive");
  if (objective.w_track < 0.0 || objective.w_term < 0.0)
    throw std::invalid_argument("ControlProblem: weights must be nonnegative");
  if (objective.w_track > 0.0 && objective.y_d.grid().size() < 2)
    throw std::invalid_argument("ControlProblem: tracking weight needs a target y_d");
  if (admissible == AdmissibleKind::Box) {
    if (!(lower.grid() == grid) || !(upper.grid() == grid))
      throw std::invalid_argument("ControlProblem: box bounds must live on the problem grid");
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (!(lower.value(k) <= upper.value(k)))
        throw std::invalid_argument("ControlProblem: box bounds must satisfy lower <= upper");
  }
}

double smooth_clamp(double x, double r, double sigma) {
  return x - sigma * softplus((x - r) / sigma) + sigma * softplus((-x - r) / sigma);
}

PLFunction smooth_stop(const PLFunction& u, const HysteresisConfig& cfg, double sigma) {
  cfg.validate();
  if (!(sigma > 0.0)) throw std::invalid_argument("smooth_stop: sigma must be positive");
  const auto& uv = u.values();
  std::vector<double> y(uv.size());
  y[0] = cfg.y0;
  for (std::size_t k = 1; k < uv.size(); ++k)
    y[k] = smooth_clamp(y[k - 1] + uv[k] - uv[k - 1], cfg.r, sigma);
  return PLFunction(u.grid(), std::move(y));
}

ObjectiveValue objective_eval(const ControlProblem& prob, const PLFunction& u) {
  prob.validate();
  if (!(u.grid() == prob.grid))
    throw std::invalid_argument("objective_eval: u must live on the problem grid");
  ObjectiveValue out;
  out.sol = stop(u, prob.cfg);
  const TrackingObjective& o = prob.objective;

  double jtrack = 0.0;
  if (o.w_track > 0.0) {
    TimeGrid merged = out.sol.grid().merged_with(o.y_d.grid());
    PLFunction e = sub(out.sol.y.on_grid(merged), o.y_d.on_grid(merged));
    jtrack = 0.5 * o.w_track * l2_product(e, GridRegulated::from_pl(e));
    out.grad.d1 = scale(e, o.w_track);
  } else {
    out.grad.d1 = PLFunction::constant(out.sol.grid(), 0.0);
  }

  double yT = out.sol.y.values().back();
  out.grad.d2 = o.w_term * (yT - o.y_T);

  Tri m = h1_operator(prob.grid, o.nu);
  out.grad.grid = prob.grid;
  out.grad.d3 = matvec(m, u.values());
  double jctrl = 0.0;
  for (std::size_t k = 0; k < out.grad.d3.size(); ++k) jctrl += 0.5 * u.value(k) * out.grad.d3[k];

  out.j = jtrack + 0.5 * o.w_term * (yT - o.y_T) * (yT - o.y_T) + jctrl;
  out.grad.value = out.j;
  return out;
}

SolveResult solve(const ControlProblem& prob, const SolveOptions& opts) {
  prob.validate();
  const TimeGrid& g = prob.grid;
  std::size_t n = g.size();
  bool box = prob.admissible == AdmissibleKind::Box;

  std::vector<double> u(n, 0.0);
  if (prob.u0.grid().size() > 1) {
    if (!(prob.u0.grid() == g))
      throw std::invalid_argument("solve: u0 must live on the problem grid");
    u = prob.u0.values();
  }
  auto project = [&](std::vector<double>& v) {
    if (!box) return;
    for (std::size_t k = 0; k < n; ++k)
      v[k] = std::clamp(v[k], prob.lower.value(k), prob.upper.value(k));
  };
  project(u);

  Tri m = h1_operator(g, prob.objective.nu);
  std::vector<double> yd(n, 0.0);
  if (prob.objective.w_track > 0.0)
    for (std::size_t k = 0; k < n; ++k) yd[k] = prob.objective.y_d.eval(g[k]);

  SolveResult res;
  auto true_j = [&](const std::vector<double>& uv) {
    return objective_eval(prob, PLFunction(g, uv)).j;
  };
  res.objective_trace.push_back(true_j(u));

  for (double sigma : opts.sigmas) {
    res.stage_starts.push_back(res.objective_trace.size() - 1);
    SmoothEval cur = smooth_objective(prob, u, sigma, m, yd);
    std::vector<double> u_prev, g_prev;
    bool have_prev = false;
    for (int it = 0; it < opts.max_iters; ++it) {
      // stationarity measure: projected gradient for box, plain otherwise
      double gn;
      if (box) {
        std::vector<double> t(n);
        for (std::size_t k = 0; k < n; ++k) t[k] = u[k] - cur.g[k];
        project(t);
        for (std::size_t k = 0; k < n; ++k) t[k] = u[k] - t[k];
        gn = inf_norm(t);
      } else {
        gn = inf_norm(cur.g);
      }
      if (gn <= opts.grad_tol * (1.0 + std::fabs(cur.j))) break;

      double s;
      if (have_prev) {
        std::vector<double> du(n), dg(n);
        for (std::size_t k = 0; k < n; ++k) {
          du[k] = u[k] - u_prev[k];
          dg[k] = cur.g[k] - g_prev[k];
        }
        double num = dot(du, dg), den = dot(dg, dg);
        s = (num > 0.0 && den > 0.0) ? num / den : 1.0 / (1.0 + inf_norm(cur.g));
      } else {
        s = 1.0 / (1.0 + inf_norm(cur.g));
      }
      s = std::clamp(s, 1e-14, 1e8);

      bool accepted = false;
      std::vector<double> cand(n);
      SmoothEval next;
      for (int bt = 0; bt < 60; ++bt) {
        for (std::size_t k = 0; k < n; ++k) cand[k] = u[k] - s * cur.g[k];
        project(cand);
        double decr = 0.0;
        for (std::size_t k = 0; k < n; ++k) decr += cur.g[k] * (u[k] - cand[k]);
        next = smooth_objective(prob, cand, sigma, m, yd);
        if (next.j <= cur.j - 1e-4 * decr) {
          accepted = true;
          break;
        }
        s *= 0.5;
      }
      if (!accepted) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "stage sigma=%.1e stalled; ", sigma);
        res.note += buf;
        break;
      }
      u_prev = u;
      g_prev = cur.g;
      have_prev = true;
      u = cand;
      cur = next;
      res.objective_trace.push_back(true_j(u));
    }
  }

  // exact solve of the stationarity system on the final clamp pattern; only
  // meaningful without tracking density and without genuine corner nodes
  if (!box && opts.polish && prob.objective.w_track == 0.0) {
    ObjectiveValue ev = objective_eval(prob, PLFunction(g, u));
    for (int round = 0; round < 30; ++round) {
      RegimeClassification cls = classify_regimes(ev.sol, prob.cfg);
      bool corner = false;
      for (std::size_t k = 1; k < cls.node.size(); ++k)
        if (cls.node[k] == Regime::BiactivePlus || cls.node[k] == Regime::BiactiveMinus)
          corner = true;
      if (corner) {
        res.note += "polish skipped: boundary corner node; ";
        break;
      }
      PLFunction up(g, u);
      std::vector<double> chi(n, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> hv(n, 0.0);
        hv[k] = 1.0;
        chi[k] = dirdiff_vi(up, PLFunction(g, std::move(hv)), prob.cfg).eta.value().back();
      }
      std::vector<double> gamma(n);
      for (std::size_t k = 0; k < n; ++k) gamma[k] = ev.grad.d2 * chi[k] + ev.grad.d3[k];
      if (inf_norm(gamma) <= 1e-14 * ev.grad.scale()) break;
      std::vector<double> rhs(n);
      for (std::size_t k = 0; k < n; ++k) rhs[k] = -gamma[k];
      std::vector<double> delta = rank1_solve(m, prob.objective.w_term, chi, rhs);
      double step = 1.0;
      bool ok = false;
      for (int bt = 0; bt < 25; ++bt) {
        std::vector<double> cand(n);
        for (std::size_t k = 0; k < n; ++k) cand[k] = u[k] + step * delta[k];
        ObjectiveValue evc = objective_eval(prob, PLFunction(g, cand));
        if (evc.j <= ev.j + 1e-12 * (1.0 + std::fabs(ev.j))) {
          u = cand;
          ev = std::move(evc);
          ok = true;
          break;
        }
        step *= 0.5;
      }
      if (!ok) {
        res.note += "polish stopped: no descent; ";
        break;
      }
      res.objective_trace.push_back(ev.j);
      if (inf_norm(delta) * step <= 1e-16 * (1.0 + inf_norm(u))) break;
    }
  }

  ObjectiveValue fin = objective_eval(prob, PLFunction(g, u));
  res.u_star = PLFunction(g, u);

  Rng rng(opts.seed);
  std::vector<PLFunction> dirs = sample_directions(prob, u, opts.direction_count, rng);
  BouligandResult br = bouligand_residual(res.u_star, fin.grad, dirs, prob.cfg);
  res.bouligand = br.min_value;

  if (!box && opts.check) {
    if (prob.objective.w_track == 0.0) {
      AdjointPair pair = build_adjoint(fin.grad);
      StationaritySamples extra = build_samples(fin, res.u_star, dirs, prob.cfg, rng);
      res.report = check_strong_stationarity(fin.sol, prob.cfg, pair, fin.grad, extra);
      res.checked = true;
    } else {
      // the sign certificate is exact only when the multiplier is a pure sum
      // of node atoms; with a running tracking term it also carries a density,
      // which no grid-level adjoint reproduces on off-grid test functions.
      // Tracking runs are certified by the directional derivative test alone.
      res.note += "certificate limited to the sampled directional derivatives "
                  "(tracking weight active); ";
    }
  }
  return res;
}

CounterexampleTable counterexample_demo(std::span<const int> n_list) {
  CounterexampleTable tab;
  tab.probe_times = {0.25, 0.5, 1.0, 1.5};
  HysteresisConfig cfg{1.0, 1.0};
  for (int n : n_list) {
    if (n < 1) throw std::invalid_argument("counterexample_demo: n must be >= 1");
    std::vector<double> nodes;
    double tb = 2.0 / n;
    for (int k = 0; k <= 128; ++k) nodes.push_back(tb * (k / 128.0));
    if (n > 1)
      for (int k = 1; k <= 64; ++k) nodes.push_back(tb + (2.0 - tb) * (k / 64.0));
    TimeGrid g(std::move(nodes));
    std::vector<double> uv(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) uv[k] = bump2(n * g[k]);
    PLFunction u(g, std::move(uv));
    StopSolution sol = stop(u, cfg);
    CounterexampleRow row;
    row.n = n;
    row.bv_u = u.bv_norm();
    row.bv_y = sol.y.bv_norm();
    for (double t : tab.probe_times) row.probes.push_back(sol.y.eval(t));
    tab.rows.push_back(std::move(row));
  }
  TimeGrid g0 = TimeGrid::uniform(2.0, 16);
  StopSolution s0 = stop(PLFunction::constant(g0, 0.0), cfg);
  for (double t : tab.probe_times) tab.zero_probes.push_back(s0.y.eval(t));
  return tab;
}

}  // namespace hysterix
