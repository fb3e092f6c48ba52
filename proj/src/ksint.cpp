#include "hysterix/ksint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hysterix {

namespace {

struct Aligned {
  TimeGrid grid;
  GridRegulated f, g;
  std::size_t ka, kb;  // node indices of a and b
};

Aligned align(const GridRegulated& f, const GridRegulated& g, double a, double b) {
  if (!(a < b)) throw std::domain_error("ks_integrate: need a < b");
  if (a < 0.0 || b > f.duration()) throw std::domain_error("ks_integrate: range outside [0, T]");
  TimeGrid m = f.grid().merged_with(g.grid()).with_nodes({a, b});
  Aligned r{m, f.on_grid(m), g.on_grid(m), m.find_node(a), m.find_node(b)};
  return r;
}

}  // namespace

double ks_integrate(const GridRegulated& f, const GridRegulated& g, double a, double b) {
  Aligned al = align(f, g, a, b);
  const auto& fl = al.f.left();
  const auto& fv = al.f.value();
  const auto& fr = al.f.right();
  const auto& gl = al.g.left();
  const auto& gv = al.g.value();
  const auto& gr = al.g.right();
  double s = 0.0;
  for (std::size_t k = al.ka; k <= al.kb; ++k) {
    // node atom with endpoint conventions g(a-) := g(a), g(b+) := g(b)
    double gm = (k == al.ka) ? gv[k] : gl[k];
    double gp = (k == al.kb) ? gv[k] : gr[k];
    s += fv[k] * (gp - gm);
    if (k < al.kb) {
      // open interval: f and g are linear there, so the mean value of f
      // against the slope of g integrates exactly
      s += 0.5 * (fr[k] + fl[k + 1]) * (gl[k + 1] - gr[k]);
    }
  }
  return s;
}

double ks_integrate(const GridRegulated& f, const GridRegulated& g) {
  return ks_integrate(f, g, 0.0, f.duration());
}

double refinement_sum(const GridRegulated& f, const GridRegulated& g, double a, double b,
                      int depth) {
  if (depth < 0) throw std::invalid_argument("refinement_sum: depth must be >= 0");
  Aligned al = align(f, g, a, b);
  const TimeGrid& m = al.grid;
  double eps0 = std::min(1e-4 * (b - a), 0.25 * m.min_spacing());
  double eps = eps0 * std::pow(4.0, -depth);
  std::size_t bulk = std::size_t(1) << std::min(depth, 8);

  // assemble partition points and tags, then sum f(tag) * (g(p_next) - g(p))
  std::vector<double> points, tags;
  for (std::size_t k = al.ka; k < al.kb; ++k) {
    double t0 = m[k], t1 = m[k + 1];
    double lo = t0, hi = t1;
    points.push_back(t0);
    if (eps > 0.0) {
      points.push_back(t0 + eps);
      tags.push_back(t0);  // cell [t0, t0+eps] tagged with the node
      lo = t0 + eps;
      hi = t1 - eps;
    }
    for (std::size_t j = 0; j < bulk; ++j) {
      double l = lo + (hi - lo) * double(j) / double(bulk);
      double r = lo + (hi - lo) * double(j + 1) / double(bulk);
      if (j > 0) points.push_back(l);
      tags.push_back(0.5 * (l + r));
    }
    if (eps > 0.0) {
      points.push_back(t1 - eps);
      tags.push_back(t1);  // cell [t1-eps, t1] tagged with the node
    }
  }
  points.push_back(m[al.kb]);

  double s = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    double gv0 = al.g.eval(points[i], Side::Value);
    double gv1 = al.g.eval(points[i + 1], Side::Value);
    s += al.f.eval(tags[i], Side::Value) * (gv1 - gv0);
  }
  return s;
}

PartialIntegrationCheck partial_integration_check(const GridRegulated& g, double tol_rc) {
  if (!g.is_right_continuous(tol_rc))
    throw std::invalid_argument("partial_integration_check: g must be right-continuous");
  PartialIntegrationCheck c;
  c.lhs = ks_integrate(g, g);
  double g0 = g.value().front(), gT = g.value().back();
  double jumps = 0.0;
  for (std::size_t k = 1; k < g.grid().size(); ++k) {
    double d = g.value()[k] - g.left()[k];
    jumps += d * d;
  }
  c.rhs = 0.5 * (gT * gT - g0 * g0) + 0.5 * jumps;
  return c;
}

double countable_support_max(const GridRegulated& g, std::span<const GridRegulated> family) {
  double worst = 0.0;
  for (const auto& f : family) worst = std::max(worst, std::fabs(ks_integrate(f, g)));
  return worst;
}

double l2_product(const PLFunction& f, const GridRegulated& g) {
  TimeGrid m = f.grid().merged_with(g.grid());
  PLFunction fr = f.on_grid(m);
  GridRegulated gr = g.on_grid(m);
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < m.size(); ++k) {
    double len = m[k + 1] - m[k];
    double f0 = fr.value(k), f1 = fr.value(k + 1);
    double g0 = gr.right()[k], g1 = gr.left()[k + 1];
    double fm = 0.5 * (f0 + f1), gm = 0.5 * (g0 + g1);
    s += len / 6.0 * (f0 * g0 + 4.0 * fm * gm + f1 * g1);
  }
  return s;
}

}  // namespace hysterix
