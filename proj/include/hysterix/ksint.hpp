#pragma once

#include <span>
#include <vector>

#include "hysterix/grid.hpp"

namespace hysterix {

// Stieltjes integral of f against g over [a, b] for regulated grid functions.
// Closed form: linear pieces integrate in closed form on each open interval,
// every node t contributes f(t) * (g(t+) - g(t-)), and at the range endpoints
// the outer limits are replaced by the values, g(a-) := g(a), g(b+) := g(b).
double ks_integrate(const GridRegulated& f, const GridRegulated& g, double a, double b);
double ks_integrate(const GridRegulated& f, const GridRegulated& g);

// Independent oracle: a tagged Riemann-Stieltjes sum whose partition pins a
// shrinking window around every node and tags both window cells with the node
// itself, so simultaneous jumps of f and g are summed as f(t)*(g(t+)-g(t-)).
// The window width shrinks like 4^-depth; away from nodes midpoint tags are
// used, which are exact on linear pieces. Used to cross-check ks_integrate,
// never to implement it.
double refinement_sum(const GridRegulated& f, const GridRegulated& g, double a, double b,
                      int depth);

struct PartialIntegrationCheck {
  double lhs = 0.0;  // integral of g against g
  double rhs = 0.0;  // half square difference plus half sum of squared jumps
  double residual() const { return lhs - rhs; }
};

// Identity for right-continuous g of bounded variation:
//   int_0^T g dg = (g(T)^2 - g(0)^2) / 2 + sum_t (g(t) - g(t-))^2 / 2.
PartialIntegrationCheck partial_integration_check(const GridRegulated& g, double tol_rc);

// Largest |int_0^T f dg| over the family, for g vanishing at 0 and T with
// countable (here: node-only) support. The identity says every f gives 0.
double countable_support_max(const GridRegulated& g, std::span<const GridRegulated> family);

// Lebesgue integral int_0^T f g dt. f is piecewise linear and g piecewise
// linear between its node limits, so the product is piecewise quadratic and
// Simpson per interval is exact. Node values of g carry no mass.
double l2_product(const PLFunction& f, const GridRegulated& g);

}  // namespace hysterix
