#include "hysterix/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "hysterix/ksint.hpp"
#include "hysterix/signals.hpp"

namespace hysterix {

namespace {

// The trajectory grid and the grid of a test direction rarely coincide, so
// most operations below work on the merged "structure" grid with the regime
// of every node and every open cell pulled back from the trajectory.
struct StructureMap {
  TimeGrid grid;
  GridRegulated z;
  std::vector<Regime> node_reg;
  std::vector<Regime> cell_reg;
};

StructureMap build_structure(const GridRegulated& z, const StopSolution& sol,
                             const HysteresisConfig& cfg) {
  RegimeClassification cls = classify_regimes(sol, cfg);
  StructureMap s;
  s.grid = z.grid().merged_with(cls.grid);
  s.z = z.on_grid(s.grid);
  s.node_reg.resize(s.grid.size());
  s.cell_reg.resize(s.grid.intervals());
  for (std::size_t k = 0; k < s.grid.size(); ++k) {
    std::size_t m = cls.grid.find_node(s.grid[k]);
    s.node_reg[k] =
        (m != TimeGrid::npos) ? cls.node[m] : cls.interval[cls.grid.interval_of(s.grid[k])];
  }
  for (std::size_t k = 0; k < s.grid.intervals(); ++k)
    s.cell_reg[k] = cls.interval[cls.grid.interval_of(s.grid[k])];
  return s;
}

// A window carrying the weight of a center with reference value zeta may only
// cover times whose regime admits that sign. Zero references are free.
bool sign_allowed(double zeta, Regime reg, double z_tol) {
  if (std::fabs(zeta) <= z_tol) return true;
  if (zeta > 0.0) return reg == Regime::Inactive || reg == Regime::BiactiveMinus;
  return reg == Regime::Inactive || reg == Regime::BiactivePlus;
}

// First fraction s in [0,1) at which the line a + (b-a)s leaves the band
// [ref-xi, ref+xi]; -1 when it stays inside. Assumes |a - ref| <= xi.
double exit_fraction(double a, double b, double ref, double xi) {
  if (b > ref + xi) return (ref + xi - a) / (b - a);
  if (b < ref - xi) return (ref - xi - a) / (b - a);
  return -1.0;
}

// Furthest position r >= x such that on (x, r) the function stays within xi
// of ref (values and one-sided limits) and every regime admits sign(ref).
// Stops exactly at the first blocking node or at the band crossing inside a
// cell; both are exact because the data is piecewise linear.
double scan_right(const StructureMap& s, double x, double ref, double xi, double z_tol) {
  const TimeGrid& g = s.grid;
  const auto& zl = s.z.left();
  const auto& zv = s.z.value();
  const auto& zr = s.z.right();
  double T = g.duration();
  if (x >= T) return T;
  std::size_t i;
  std::size_t m = g.find_node(x);
  if (m == TimeGrid::npos) {
    i = g.interval_of(x);
    if (!sign_allowed(ref, s.cell_reg[i], z_tol)) return x;
    double t0 = g[i], t1 = g[i + 1];
    double a = zr[i] + (zl[i + 1] - zr[i]) * ((x - t0) / (t1 - t0));
    if (std::fabs(a - ref) > xi) return x;
    double f = exit_fraction(a, zl[i + 1], ref, xi);
    if (f >= 0.0) return x + f * (t1 - x);
    if (i + 1 == g.size() - 1) return T;
    if (!sign_allowed(ref, s.node_reg[i + 1], z_tol)) return t1;
    if (std::fabs(zv[i + 1] - ref) > xi || std::fabs(zr[i + 1] - ref) > xi) return t1;
    i = i + 1;
  } else {
    if (std::fabs(zr[m] - ref) > xi) return x;
    i = m;
  }
  for (;;) {
    if (!sign_allowed(ref, s.cell_reg[i], z_tol)) return g[i];
    double f = exit_fraction(zr[i], zl[i + 1], ref, xi);
    if (f >= 0.0) return g[i] + f * (g[i + 1] - g[i]);
    if (i + 1 == g.size() - 1) return T;
    if (!sign_allowed(ref, s.node_reg[i + 1], z_tol)) return g[i + 1];
    if (std::fabs(zv[i + 1] - ref) > xi || std::fabs(zr[i + 1] - ref) > xi) return g[i + 1];
    ++i;
  }
}

double scan_left(const StructureMap& s, double x, double ref, double xi, double z_tol) {
  const TimeGrid& g = s.grid;
  const auto& zl = s.z.left();
  const auto& zv = s.z.value();
  const auto& zr = s.z.right();
  if (x <= 0.0) return 0.0;
  std::size_t i;
  std::size_t m = g.find_node(x);
  if (m == TimeGrid::npos) {
    i = g.interval_of(x);
    if (!sign_allowed(ref, s.cell_reg[i], z_tol)) return x;
    double t0 = g[i], t1 = g[i + 1];
    double a = zr[i] + (zl[i + 1] - zr[i]) * ((x - t0) / (t1 - t0));
    if (std::fabs(a - ref) > xi) return x;
    double f = exit_fraction(a, zr[i], ref, xi);
    if (f >= 0.0) return x - f * (x - t0);
    if (i == 0) return 0.0;
    if (!sign_allowed(ref, s.node_reg[i], z_tol)) return t0;
    if (std::fabs(zv[i] - ref) > xi || std::fabs(zl[i] - ref) > xi) return t0;
    i = i - 1;
  } else {
    if (std::fabs(zl[m] - ref) > xi) return x;
    if (m == 0) return 0.0;
    i = m - 1;
  }
  for (;;) {
    if (!sign_allowed(ref, s.cell_reg[i], z_tol)) return g[i + 1];
    double f = exit_fraction(zl[i + 1], zr[i], ref, xi);
    if (f >= 0.0) return g[i + 1] - f * (g[i + 1] - g[i]);
    if (i == 0) return 0.0;
    if (!sign_allowed(ref, s.node_reg[i], z_tol)) return g[i];
    if (std::fabs(zv[i] - ref) > xi || std::fabs(zl[i] - ref) > xi) return g[i];
    --i;
  }
}

struct CoverCenter {
  double c = 0.0;
  double zeta = 0.0;
  bool jump = false;
  double l = 0.0, r = 0.0;  // validity window from the scans
};

double value_at(const StructureMap& s, double x) {
  std::size_t m = s.grid.find_node(x);
  if (m != TimeGrid::npos) return s.z.value()[m];
  std::size_t i = s.grid.interval_of(x);
  double t0 = s.grid[i], t1 = s.grid[i + 1];
  return s.z.right()[i] + (s.z.left()[i + 1] - s.z.right()[i]) * ((x - t0) / (t1 - t0));
}

CoverCenter cont_center(const StructureMap& s, double x, double xi, double z_tol) {
  double zeta = value_at(s, x);
  if (std::fabs(zeta) <= z_tol) zeta = 0.0;
  CoverCenter c;
  c.c = x;
  c.zeta = zeta;
  c.jump = false;
  c.l = scan_left(s, x, zeta, xi, z_tol);
  c.r = scan_right(s, x, zeta, xi, z_tol);
  return c;
}

CoverCenter jump_center(const StructureMap& s, std::size_t m, double xi, double z_tol) {
  CoverCenter c;
  c.c = s.grid[m];
  c.zeta = s.z.left()[m];
  c.jump = true;
  // left of the jump the window carries the left limit; right of it the
  // contribution is cut off entirely, so only closeness to 0 matters there
  c.l = scan_left(s, c.c, c.zeta, xi, z_tol);
  c.r = scan_right(s, c.c, 0.0, xi, z_tol);
  return c;
}

// Greedy chain of centers whose validity windows overlap consecutively and
// pass through every jump node. Fallback candidates sit exactly at blocking
// grid nodes or at the band-crossing point, so each step advances and the
// total count stays bounded by the variation budget.
std::vector<CoverCenter> build_cover(const StructureMap& s, double xi, double z_tol) {
  const TimeGrid& g = s.grid;
  double T = g.duration();
  std::vector<std::size_t> jumps;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (std::fabs(s.z.value()[k] - s.z.left()[k]) > z_tol) jumps.push_back(k);

  std::vector<CoverCenter> cv;
  cv.push_back(cont_center(s, 0.0, xi, z_tol));
  std::size_t nj = 0;
  double var = s.z.total_variation();
  std::size_t cap = 64 + 4 * g.size() + static_cast<std::size_t>(std::ceil(8.0 * var / xi));
  while (cv.size() <= cap) {
    const CoverCenter cur = cv.back();
    bool have_m = nj < jumps.size();
    double m_pos = have_m ? g[jumps[nj]] : std::numeric_limits<double>::infinity();
    if (!have_m && cur.r >= T) return cv;
    if (have_m) {
      CoverCenter mc = jump_center(s, jumps[nj], xi, z_tol);
      if (mc.c > cur.c && mc.l < std::min(cur.r, mc.c)) {
        cv.push_back(mc);
        ++nj;
        continue;
      }
    }
    double hi = std::min(cur.r, m_pos);
    if (!(hi > cur.c)) throw std::runtime_error("polyhedric_approx: cover cannot advance");
    std::vector<double> cand;
    for (std::size_t k = 0; k < g.size(); ++k) {
      double t = g[k];
      if (t > cur.c && t <= hi && t < m_pos) cand.push_back(t);
    }
    if (cur.r > cur.c && cur.r < m_pos && g.find_node(cur.r) == TimeGrid::npos)
      cand.push_back(cur.r);
    if (cand.empty()) cand.push_back(0.5 * (cur.c + hi));
    bool have_best = false;
    CoverCenter best;
    for (double x : cand) {
      CoverCenter cc = cont_center(s, x, xi, z_tol);
      if (!(cc.c > cur.c) || !(cc.l < std::min(cur.r, cc.c))) continue;
      if (!have_best || cc.r > best.r || (cc.r == best.r && cc.c > best.c)) {
        best = cc;
        have_best = true;
      }
    }
    if (!have_best) throw std::runtime_error("polyhedric_approx: cover construction stalled");
    cv.push_back(best);
  }
  throw std::runtime_error("polyhedric_approx: cover exceeded its budget");
}

struct Seam {
  double a = 0.0, b = 0.0;
};

// One monotone switch per consecutive pair, strictly between the centers and
// inside both validity windows. Disjoint switch windows make the chained
// weights sum to one exactly and keep full weight at every center.
std::vector<Seam> build_seams(const std::vector<CoverCenter>& cv) {
  std::vector<Seam> sm;
  for (std::size_t k = 0; k + 1 < cv.size(); ++k) {
    double lo = std::max(cv[k].c, cv[k + 1].l);
    double hi = std::min(cv[k].r, cv[k + 1].c);
    if (!(lo < hi)) throw std::runtime_error("polyhedric_approx: switch window collapsed");
    double a = lo + 0.25 * (hi - lo);
    double b = hi - 0.25 * (hi - lo);
    if (!(a < b)) {
      a = lo;
      b = hi;
    }
    sm.push_back({a, b});
  }
  return sm;
}

struct Blend {
  std::size_t i0 = 0;
  double w0 = 1.0;
  std::size_t i1 = 0;
  double w1 = 0.0;
};

Blend blend_at(const std::vector<Seam>& sm, double sp) {
  Blend b;
  if (sm.empty()) return b;
  std::size_t q = 0;
  while (q < sm.size() && sm[q].b < sp) ++q;
  if (q == sm.size()) {
    b.i0 = b.i1 = sm.size();
    return b;
  }
  if (sp < sm[q].a) {
    b.i0 = b.i1 = q;
    return b;
  }
  double sg = smooth_step01((sp - sm[q].a) / (sm[q].b - sm[q].a));
  b.i0 = q;
  b.w0 = 1.0 - sg;
  b.i1 = q + 1;
  b.w1 = sg;
  return b;
}

double jump_factor(const CoverCenter& c, double sp, Side side) {
  if (!c.jump) return 1.0;
  if (sp < c.c) return 1.0;
  if (sp > c.c) return 0.0;
  return side == Side::Left ? 1.0 : 0.0;
}

// Smooth cutoff replacing the sharp left-sided factor: identically 1 up to
// c - 2/i and identically 0 from c - 1/i on.
double cut_factor(const CoverCenter& c, double sp, int i) {
  if (!c.jump) return 1.0;
  return 1.0 - smooth_step01(static_cast<double>(i) * (sp - c.c) + 2.0);
}

double chain_eval(const std::vector<CoverCenter>& cv, const std::vector<Seam>& sm, double sp,
                  Side side, double cap) {
  Blend bl = blend_at(sm, sp);
  double v = cv[bl.i0].zeta * bl.w0 * jump_factor(cv[bl.i0], sp, side);
  if (bl.i1 != bl.i0 && bl.w1 != 0.0)
    v += cv[bl.i1].zeta * bl.w1 * jump_factor(cv[bl.i1], sp, side);
  return std::clamp(v, -cap, cap);
}

double chain_eval_cut(const std::vector<CoverCenter>& cv, const std::vector<Seam>& sm, double sp,
                      int i, double cap) {
  Blend bl = blend_at(sm, sp);
  double v = cv[bl.i0].zeta * bl.w0 * cut_factor(cv[bl.i0], sp, i);
  if (bl.i1 != bl.i0 && bl.w1 != 0.0) v += cv[bl.i1].zeta * bl.w1 * cut_factor(cv[bl.i1], sp, i);
  return std::clamp(v, -cap, cap);
}

double cone_distance(Cone c, double x) {
  switch (c) {
    case Cone::Free: return 0.0;
    case Cone::NonPos: return std::max(0.0, x);
    case Cone::NonNeg: return std::max(0.0, -x);
    case Cone::Zero: return std::fabs(x);
  }
  return 0.0;
}

}  // namespace

MembershipResult reduced_cone_membership(const GridRegulated& z, const StopSolution& sol,
                                         const HysteresisConfig& cfg) {
  cfg.validate();
  StructureMap s = build_structure(z, sol, cfg);
  double tol = kTolEq * (1.0 + z.sup_norm());
  MembershipResult res;
  char buf[160];
  const auto& zl = s.z.left();
  const auto& zv = s.z.value();
  const auto& zr = s.z.right();
  std::size_t n = s.grid.size();

  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (std::fabs(zr[k] - zv[k]) > tol) {
      std::snprintf(buf, sizeof buf, "not right-continuous at t=%.9g", s.grid[k]);
      res.reasons.push_back(buf);
    }
  }
  if (std::fabs(zv[0]) > tol) {
    std::snprintf(buf, sizeof buf, "z(0) = %.3g, expected 0", zv[0]);
    res.reasons.push_back(buf);
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!cone_contains(cone_of(s.node_reg[k]), zv[k], tol)) {
      std::snprintf(buf, sizeof buf, "node cone violated at t=%.9g", s.grid[k]);
      res.reasons.push_back(buf);
    }
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    Cone c = cone_of(s.cell_reg[k]);
    if (!cone_contains(c, zr[k], tol) || !cone_contains(c, zl[k + 1], tol)) {
      std::snprintf(buf, sizeof buf, "interval cone violated on (%.9g, %.9g)", s.grid[k],
                    s.grid[k + 1]);
      res.reasons.push_back(buf);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (std::fabs(zv[k] - zl[k]) > tol && std::fabs(zv[k]) > tol) {
      std::snprintf(buf, sizeof buf, "jump at t=%.9g does not land at 0", s.grid[k]);
      res.reasons.push_back(buf);
    }
  }
  res.criticality_integral =
      ks_integrate(s.z, GridRegulated::from_pl(sol.w), 0.0, s.grid.duration());
  double ctol = tol * (1.0 + sol.w.total_variation());
  if (std::fabs(res.criticality_integral) > ctol) {
    std::snprintf(buf, sizeof buf, "criticality integral %.3g is nonzero",
                  res.criticality_integral);
    res.reasons.push_back(buf);
  }
  res.member = res.reasons.empty();
  return res;
}

std::optional<double> radial_membership(const PLFunction& z, const StopSolution& sol,
                                        const HysteresisConfig& cfg, RadialOptions opt) {
  cfg.validate();
  if (!(opt.alpha_max > 0.0))
    throw std::invalid_argument("radial_membership: alpha_max must be positive");
  StructureMap s = build_structure(GridRegulated::from_pl(z), sol, cfg);
  double z_tol = kTolEq * (1.0 + z.sup_norm());
  const auto& zv = s.z.value();
  for (std::size_t k = 0; k < s.grid.size(); ++k)
    if (!cone_contains(cone_of(s.node_reg[k]), zv[k], z_tol)) return std::nullopt;

  PLFunction y = sol.y.on_grid(s.grid);
  double a = opt.alpha_max;
  for (std::size_t k = 0; k < s.grid.size(); ++k) {
    double yk = y.value(k);
    if (zv[k] > z_tol)
      a = std::min(a, (cfg.r - yk) / zv[k]);
    else if (zv[k] < -z_tol)
      a = std::min(a, (-cfg.r - yk) / zv[k]);
  }
  double floor = opt.alpha_floor < 0.0 ? s.grid.max_spacing() : opt.alpha_floor;
  if (a > floor && a > 0.0) return a;
  return std::nullopt;
}

PolyhedricApprox polyhedric_approx(const GridRegulated& z, int j, std::span<const int> i_list,
                                   const StopSolution& sol, const HysteresisConfig& cfg) {
  cfg.validate();
  if (j < 1) throw std::invalid_argument("polyhedric_approx: j must be >= 1");
  for (int i : i_list)
    if (i < 1) throw std::invalid_argument("polyhedric_approx: every i must be >= 1");
  MembershipResult mem = reduced_cone_membership(z, sol, cfg);
  if (!mem.member)
    throw std::invalid_argument("polyhedric_approx: direction is outside the reduced cone (" +
                                mem.reasons.front() + ")");

  StructureMap s = build_structure(z, sol, cfg);
  double sup = z.sup_norm();
  double z_tol = kTolEq * (1.0 + sup);
  double xi = 1.0 / static_cast<double>(j);
  // scans use a slightly tightened band so that the sampled output meets the
  // advertised 1/j bound with room for the zero-reference snapping
  double xi_eff = xi * (1.0 - 1e-6) - 2.0 * z_tol;
  if (!(xi_eff > 0.0))
    throw std::invalid_argument("polyhedric_approx: j too large for the data scale");

  std::vector<CoverCenter> cv = build_cover(s, xi_eff, z_tol);
  std::vector<Seam> sm = build_seams(cv);

  std::vector<double> extra;
  for (const CoverCenter& c : cv) extra.push_back(c.c);
  for (const Seam& w : sm)
    for (int q = 0; q <= 8; ++q) extra.push_back(w.a + (w.b - w.a) * (q / 8.0));
  TimeGrid gout = s.grid.with_nodes(extra);

  PolyhedricApprox out;
  out.xi = xi;
  out.center_count = cv.size();
  for (const CoverCenter& c : cv) out.jump_center_count += c.jump ? 1 : 0;
  out.i_list.assign(i_list.begin(), i_list.end());

  std::size_t n = gout.size();
  std::vector<double> lv(n), vv(n), rv(n);
  for (std::size_t k = 0; k < n; ++k) {
    lv[k] = chain_eval(cv, sm, gout[k], Side::Left, sup);
    vv[k] = chain_eval(cv, sm, gout[k], Side::Value, sup);
    rv[k] = chain_eval(cv, sm, gout[k], Side::Right, sup);
  }
  out.z_j = GridRegulated(gout, std::move(lv), std::move(vv), std::move(rv));

  double T = gout.duration();
  for (int i : out.i_list) {
    std::vector<double> pts;
    double w = 1.0 / static_cast<double>(i);
    for (const CoverCenter& c : cv) {
      if (!c.jump) continue;
      for (int q = 0; q <= 8; ++q) {
        double t = (c.c - 2.0 * w) + w * (q / 8.0);
        if (t > 0.0 && t < T) pts.push_back(t);
      }
    }
    TimeGrid gi = gout.with_nodes(pts);
    std::vector<double> vals(gi.size());
    for (std::size_t k = 0; k < gi.size(); ++k) vals[k] = chain_eval_cut(cv, sm, gi[k], i, sup);
    out.z_ij.emplace_back(gi, std::move(vals));
  }
  return out;
}

PLFunction polar_probe(double t, double c, int i, const StopSolution& sol,
                       const HysteresisConfig& cfg) {
  cfg.validate();
  if (i < 1) throw std::invalid_argument("polar_probe: i must be >= 1");
  RegimeClassification cls = classify_regimes(sol, cfg);
  const TimeGrid& g = cls.grid;
  if (!(t >= 0.0 && t <= g.duration()))
    throw std::invalid_argument("polar_probe: t outside [0, T]");
  std::size_t m = g.find_node(t);
  Regime reg = (m != TimeGrid::npos) ? cls.node[m] : cls.interval[g.interval_of(t)];
  if (!polar_contains(reg, c, kTolEq * (1.0 + std::fabs(c))))
    throw std::invalid_argument("polar_probe: c is outside the polar cone at t");

  double w = 1.0 / static_cast<double>(i);
  std::vector<double> pts;
  for (int q = 0; q <= 16; ++q) {
    double sp = (t - w) + w * (q / 16.0);
    if (sp > 0.0 && sp < g.duration()) pts.push_back(sp);
  }
  TimeGrid gp = g.with_nodes(pts);
  std::vector<double> vals(gp.size());
  for (std::size_t k = 0; k < gp.size(); ++k)
    vals[k] = c * rising_unit_step(static_cast<double>(i) * (gp[k] - t));
  return PLFunction(gp, std::move(vals));
}

double ObjectiveGradient::scale() const {
  double m = 0.0;
  for (double v : d3) m = std::max(m, std::fabs(v));
  double s = 1.0 + std::fabs(d2) + m;
  if (d1.grid().size() > 1) s += d1.sup_norm();
  return s;
}

BouligandResult bouligand_residual(const PLFunction& u, const ObjectiveGradient& grad,
                                   std::span<const PLFunction> directions,
                                   const HysteresisConfig& cfg, Exec exec) {
  cfg.validate();
  if (grad.grid.size() != grad.d3.size())
    throw std::invalid_argument("bouligand_residual: gradient data does not match its grid");
  BouligandResult res;
  res.values.resize(directions.size());
  parallel_for(exec, directions.size(), [&](std::size_t idx) {
    DerivativeResult d = dirdiff_vi(u, directions[idx], cfg);
    double v = 0.0;
    if (grad.d1.grid().size() > 1) v += l2_product(grad.d1, d.eta);
    v += grad.d2 * d.eta.value().back();
    for (std::size_t k = 0; k < grad.d3.size(); ++k)
      v += grad.d3[k] * directions[idx].eval(grad.grid[k]);
    res.values[idx] = v;
  });
  res.min_value = res.values.empty() ? 0.0 : res.values[0];
  for (std::size_t idx = 0; idx < res.values.size(); ++idx) {
    if (res.values[idx] <= res.min_value) {
      res.min_value = res.values[idx];
      res.argmin = idx;
    }
  }
  return res;
}

double Multiplier::apply(const GridRegulated& z) const {
  double s = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) s += atoms[k] * z.eval(grid[k], Side::Value);
  if (density.grid().size() > 1) s += l2_product(density, z);
  return s;
}

AdjointPair build_adjoint(const ObjectiveGradient& grad) {
  std::size_t n = grad.grid.size();
  if (n < 2 || grad.d3.size() != n)
    throw std::invalid_argument("build_adjoint: gradient coefficients must sit on the grid nodes");
  std::vector<double> l(n), v(n), r(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    l[k] = acc;
    acc += grad.d3[k];
    v[k] = (k + 1 < n) ? l[k] : acc;  // left-continuous before T, jump lands at T
    r[k] = acc;
  }
  AdjointPair out;
  out.p = GridRegulated(grad.grid, std::move(l), std::move(v), std::move(r));
  out.mu.grid = grad.grid;
  out.mu.atoms = grad.d3;
  out.mu.atoms.back() += grad.d2;
  out.mu.density = grad.d1;
  return out;
}

GridRegulated modified_adjoint(const AdjointPair& pair, const ObjectiveGradient& grad) {
  std::vector<double> l = pair.p.left();
  std::vector<double> v = pair.p.value();
  std::vector<double> r = pair.p.right();
  v.back() += grad.d2;
  r.back() = v.back();
  return GridRegulated(pair.p.grid(), std::move(l), std::move(v), std::move(r));
}

std::string StationarityReport::summary() const {
  std::string out = pass ? "strong stationarity system: PASS\n" : "strong stationarity system: FAIL\n";
  char buf[256];
  for (const LineReport& ln : lines) {
    std::snprintf(buf, sizeof buf, "  [%s] %s: residual %.3e (tol %.3e, family %zu, worst %s)\n",
                  ln.pass ? "ok" : "FAIL", ln.name.c_str(), ln.residual, ln.tol, ln.family_size,
                  ln.worst.empty() ? "-" : ln.worst.c_str());
    out += buf;
  }
  if (terminal_jump_residual) {
    std::snprintf(buf, sizeof buf, "  terminal jump identity: residual %.3e (tol %.3e)\n",
                  *terminal_jump_residual, terminal_jump_tol);
    out += buf;
  } else {
    out += "  terminal jump identity: skipped (final time is on the boundary)\n";
  }
  std::snprintf(buf, sizeof buf, "  modified-adjoint equivalence: residual %.3e (tol %.3e)\n",
                qform_residual, qform_tol);
  out += buf;
  return out;
}

std::string stationarity_report_json(const StationarityReport& rep) {
  nlohmann::json jl = nlohmann::json::array();
  for (const LineReport& ln : rep.lines) {
    jl.push_back({{"name", ln.name},
                  {"residual", ln.residual},
                  {"tol", ln.tol},
                  {"pass", ln.pass},
                  {"worst", ln.worst},
                  {"family_size", ln.family_size}});
  }
  nlohmann::json j{{"pass", rep.pass},
                   {"lines", jl},
                   {"qform", {{"residual", rep.qform_residual}, {"tol", rep.qform_tol}}}};
  if (rep.terminal_jump_residual)
    j["terminal_jump"] = {{"residual", *rep.terminal_jump_residual},
                          {"tol", rep.terminal_jump_tol}};
  else
    j["terminal_jump"] = nullptr;
  return j.dump(2);
}

StationarityReport check_strong_stationarity(const StopSolution& sol, const HysteresisConfig& cfg,
                                             const AdjointPair& pair,
                                             const ObjectiveGradient& grad,
                                             const StationaritySamples& extra, double tol_rel,
                                             Exec exec) {
  cfg.validate();
  RegimeClassification cls = classify_regimes(sol, cfg);
  const GridRegulated& p = pair.p;
  double sc = grad.scale();
  double tol = tol_rel * sc;
  double T = sol.grid().duration();
  StationarityReport rep;
  char buf[160];

  {  // boundary values and left-continuity of p
    LineReport ln;
    ln.name = "adjoint boundary values and left continuity";
    ln.tol = tol;
    ln.residual = std::fabs(p.value().front());
    ln.worst = "p(0)";
    if (std::fabs(p.value().back()) > ln.residual) {
      ln.residual = std::fabs(p.value().back());
      ln.worst = "p(T)";
    }
    for (std::size_t k = 0; k + 1 < p.grid().size(); ++k) {
      double d = std::fabs(p.value()[k] - p.left()[k]);
      if (d > ln.residual) {
        ln.residual = d;
        std::snprintf(buf, sizeof buf, "left limit at t=%.9g", p.grid()[k]);
        ln.worst = buf;
      }
    }
    ln.family_size = p.grid().size();
    ln.pass = ln.residual <= ln.tol;
    rep.lines.push_back(ln);
  }

  {  // left limits of p inside the node cones
    LineReport ln;
    ln.name = "adjoint left limits inside the node cones";
    ln.tol = tol;
    for (std::size_t k = 0; k < cls.grid.size(); ++k) {
      double pl = p.eval(cls.grid[k], Side::Left);
      double d = cone_distance(cone_of(cls.node[k]), pl);
      if (d > ln.residual) {
        ln.residual = d;
        std::snprintf(buf, sizeof buf, "t=%.9g", cls.grid[k]);
        ln.worst = buf;
      }
    }
    ln.family_size = cls.grid.size();
    ln.pass = ln.residual <= ln.tol;
    rep.lines.push_back(ln);
  }

  {  // nonnegativity of the multiplier on the sampled reduced cone
    std::vector<GridRegulated> fam;
    std::size_t n = cls.grid.size();
    for (std::size_t m = 0; m + 1 < n; ++m) {
      for (double sgn : {1.0, -1.0}) {
        if (!cone_contains(cone_of(cls.interval[m]), sgn, 0.0)) continue;
        // ramp rising over one interval, dropping back to 0 at its end node
        std::vector<double> l(n, 0.0), v(n, 0.0), r(n, 0.0);
        l[m + 1] = sgn;
        fam.emplace_back(cls.grid, std::move(l), std::move(v), std::move(r));
      }
    }
    std::vector<const GridRegulated*> all;
    for (const auto& z : fam) all.push_back(&z);
    for (const auto& z : extra.cone_zs) all.push_back(&z);
    std::vector<double> vals(all.size(), 0.0);
    parallel_for(exec, all.size(), [&](std::size_t idx) { vals[idx] = pair.mu.apply(*all[idx]); });
    LineReport ln;
    ln.name = "multiplier nonnegative on the sampled cone";
    ln.tol = tol;
    double vmin = 0.0;
    std::size_t arg = 0;
    for (std::size_t idx = 0; idx < vals.size(); ++idx) {
      if (vals[idx] < vmin) {
        vmin = vals[idx];
        arg = idx;
      }
    }
    ln.residual = std::max(0.0, -vmin);
    if (ln.residual > 0.0) {
      std::snprintf(buf, sizeof buf, "cone sample #%zu of %zu", arg, vals.size());
      ln.worst = buf;
    }
    ln.family_size = all.size();
    ln.pass = ln.residual <= ln.tol;
    rep.lines.push_back(ln);
  }

  {  // integration against p reproduces the control gradient pairing
    std::vector<PLFunction> fam;
    std::size_t n = grad.grid.size();
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> v(n, 0.0);
      v[k] = 1.0;
      fam.emplace_back(grad.grid, std::move(v));
    }
    fam.push_back(PLFunction::constant(grad.grid, 1.0));
    std::vector<const PLFunction*> all;
    for (const auto& h : fam) all.push_back(&h);
    for (const auto& h : extra.hs) all.push_back(&h);
    std::vector<double> vals(all.size(), 0.0);
    parallel_for(exec, all.size(), [&](std::size_t idx) {
      const PLFunction& h = *all[idx];
      double v1 = ks_integrate(GridRegulated::from_pl(h), p, 0.0, T);
      double v2 = 0.0;
      for (std::size_t k = 0; k < grad.d3.size(); ++k) v2 += grad.d3[k] * h.eval(grad.grid[k]);
      vals[idx] = std::fabs(v1 - v2);
    });
    LineReport ln;
    ln.name = "adjoint reproduces the control gradient pairing";
    ln.tol = tol;
    for (std::size_t idx = 0; idx < vals.size(); ++idx) {
      if (vals[idx] > ln.residual) {
        ln.residual = vals[idx];
        std::snprintf(buf, sizeof buf, "direction #%zu of %zu", idx, vals.size());
        ln.worst = buf;
      }
    }
    ln.family_size = all.size();
    ln.pass = ln.residual <= ln.tol;
    rep.lines.push_back(ln);
  }

  {  // defining identity of the multiplier, and the modified-adjoint form
    std::vector<GridRegulated> fam;
    const TimeGrid& g = grad.grid;
    for (std::size_t k = 0; k < g.size(); ++k) fam.push_back(point_indicator(g, g[k]));
    for (std::size_t m = 0; m + 1 < g.size(); ++m)
      fam.push_back(interval_indicator(g, g[m], g[m + 1], IntervalKind::Open));
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::vector<double> v(g.size(), 0.0);
      v[k] = 1.0;
      fam.push_back(GridRegulated::from_pl(PLFunction(g, std::move(v))));
    }
    std::vector<const GridRegulated*> all;
    for (const auto& z : fam) all.push_back(&z);
    for (const auto& z : extra.reg_zs) all.push_back(&z);
    GridRegulated q = modified_adjoint(pair, grad);
    std::vector<double> vals(all.size(), 0.0);
    std::vector<double> qvals(all.size(), 0.0);
    bool has_density = grad.d1.grid().size() > 1;
    parallel_for(exec, all.size(), [&](std::size_t idx) {
      const GridRegulated& z = *all[idx];
      double zp = ks_integrate(z, p, 0.0, T);
      double base = zp + grad.d2 * z.eval(T, Side::Value);
      if (has_density) base += l2_product(grad.d1, z);
      vals[idx] = std::fabs(pair.mu.apply(z) - base);
      qvals[idx] = std::fabs(ks_integrate(z, q, 0.0, T) - zp - grad.d2 * z.eval(T, Side::Value));
    });
    LineReport ln;
    ln.name = "multiplier matches its defining identity";
    ln.tol = tol;
    for (std::size_t idx = 0; idx < vals.size(); ++idx) {
      if (vals[idx] > ln.residual) {
        ln.residual = vals[idx];
        std::snprintf(buf, sizeof buf, "regulated sample #%zu of %zu", idx, vals.size());
        ln.worst = buf;
      }
    }
    ln.family_size = all.size();
    ln.pass = ln.residual <= ln.tol;
    rep.lines.push_back(ln);
    rep.qform_tol = 1e-8 * sc;
    for (double v : qvals) rep.qform_residual = std::max(rep.qform_residual, v);
  }

  rep.terminal_jump_tol = 1e-8 * sc;
  if (cls.node.back() == Regime::Inactive) {
    double tj = std::fabs((p.left().back() - p.value().back()) - grad.d2);
    rep.terminal_jump_residual = tj;
  }

  rep.pass = true;
  for (const LineReport& ln : rep.lines) rep.pass = rep.pass && ln.pass;
  return rep;
}

}  // namespace hysterix
