#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hysterix/ksint.hpp"
#include "hysterix/signals.hpp"

using namespace hysterix;

namespace {

GridRegulated mixed(Rng& rng, const TimeGrid& g, int which) {
  switch (which % 4) {
    case 0: return random_regulated(rng, g, 1.0, 0.4);
    case 1: return random_rc_step(rng, g, 1.0);
    case 2: return GridRegulated::from_pl(random_pl(rng, g, 1.0));
    default: return random_node_supported(rng, g, 1.0);
  }
}

}  // namespace

TEST_CASE("integrating a constant telescopes the integrator") {
  Rng rng(1);
  for (int i = 0; i < 40; ++i) {
    TimeGrid g = random_grid(rng, 2.0, 6 + i % 9, 0.4);
    GridRegulated f = GridRegulated::constant(g, 3.5);
    GridRegulated w = mixed(rng, g, i);
    double want = 3.5 * (w.eval(2.0) - w.eval(0.0));
    CHECK(ks_integrate(f, w, 0.0, 2.0) == doctest::Approx(want).epsilon(1e-14));
    // interior endpoints use the one-sided limits as boundary values
    double a = 0.3, b = 1.7;
    double want_ab = 3.5 * (w.eval(b, Side::Right) - w.eval(a, Side::Left));
    if (g.find_node(a) == TimeGrid::npos) want_ab = 3.5 * (w.eval(b, Side::Right) - w.eval(a));
    if (g.find_node(b) == TimeGrid::npos)
      want_ab = 3.5 * (w.eval(b) - (g.find_node(a) == TimeGrid::npos
                                        ? w.eval(a)
                                        : w.eval(a, Side::Left)));
    CHECK(ks_integrate(f, w, a, b) == doctest::Approx(want_ab).epsilon(1e-13));
  }
}

TEST_CASE("a single point mass picks out the integrand value") {
  TimeGrid g({0.0, 0.7, 2.0});
  // integrator jumps only at t = 0.7: left 0, value 2, right 5
  GridRegulated w(g, {0.0, 0.0, 5.0}, {0.0, 2.0, 5.0}, {0.0, 5.0, 5.0});
  Rng rng(5);
  for (int i = 0; i < 25; ++i) {
    GridRegulated f = mixed(rng, g, i);
    double want = f.eval(0.7) * 5.0;  // f(t) (w(t+) - w(t-))
    CHECK(ks_integrate(f, w, 0.0, 2.0) == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("additivity in the interval") {
  Rng rng(23);
  for (int i = 0; i < 60; ++i) {
    TimeGrid g = random_grid(rng, 3.0, 7 + i % 6, 0.4);
    GridRegulated f = mixed(rng, g, i);
    GridRegulated w = mixed(rng, g, i + 1);
    double c = (i % 2 == 0) ? g[2] : 1.234567;  // alternate node and non-node splits
    double whole = ks_integrate(f, w, 0.0, 3.0);
    double split = ks_integrate(f, w, 0.0, c) + ks_integrate(f, w, c, 3.0);
    CHECK(split == doctest::Approx(whole).epsilon(1e-13));
  }
}

TEST_CASE("subinterval indicators measure the integrator increment") {
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    TimeGrid g = random_grid(rng, 2.0, 9, 0.4);
    GridRegulated w = mixed(rng, g, i);
    double c = g[2], d = g[6];
    GridRegulated ind = interval_indicator(g, c, d, IntervalKind::Closed);
    double want = w.eval(d, Side::Right) - w.eval(c, Side::Left);
    CHECK(ks_integrate(ind, w, 0.0, 2.0) == doctest::Approx(want).epsilon(1e-13));

    GridRegulated open = interval_indicator(g, c, d, IntervalKind::Open);
    double want_open = w.eval(d, Side::Left) - w.eval(c, Side::Right);
    CHECK(ks_integrate(open, w, 0.0, 2.0) == doctest::Approx(want_open).epsilon(1e-13));
  }
}

TEST_CASE("functions supported on countably many points integrate to zero") {
  Rng rng(47);
  for (int i = 0; i < 40; ++i) {
    TimeGrid g = random_grid(rng, 2.0, 8, 0.4);
    GridRegulated ns = random_node_supported(rng, g, 2.0);
    // continuous integrator: no atoms anywhere, so the nodes carry no mass
    GridRegulated w = GridRegulated::from_pl(random_pl(rng, g, 1.5));
    CHECK(ks_integrate(ns, w, 0.0, 2.0) == 0.0);
    std::vector<GridRegulated> fam{w, GridRegulated::from_pl(random_pl(rng, g, 1.0))};
    CHECK(countable_support_max(ns, fam) == 0.0);
  }
}

TEST_CASE("integration by parts for right-continuous step data") {
  Rng rng(61);
  for (int i = 0; i < 60; ++i) {
    TimeGrid g = random_grid(rng, 2.0, 5 + i % 11, 0.4);
    GridRegulated w = random_rc_step(rng, g, 2.0);
    PartialIntegrationCheck pc = partial_integration_check(w, kTolEq);
    CHECK(std::fabs(pc.residual()) <= 1e-12 * (1.0 + std::fabs(pc.lhs)));
  }
}

TEST_CASE("closed form against the refinement oracle") {
  Rng rng(77);
  for (int i = 0; i < 40; ++i) {
    double T = 1.0 + (i % 3);
    TimeGrid gf = random_grid(rng, T, 6 + i % 7, 0.35);
    TimeGrid gw = random_grid(rng, T, 5 + (i / 2) % 9, 0.35);
    GridRegulated f = mixed(rng, gf, i);
    GridRegulated w = mixed(rng, gw, i + 2);
    double a = (i % 3 == 0) ? 0.21 * T : 0.0;
    double b = (i % 3 == 0) ? 0.87 * T : T;
    double v1 = ks_integrate(f, w, a, b);
    double v2 = refinement_sum(f, w, a, b, 12);
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-9));
  }
}

TEST_CASE("linearity in both arguments") {
  Rng rng(91);
  TimeGrid g = random_grid(rng, 2.0, 10, 0.4);
  GridRegulated f1 = mixed(rng, g, 0), f2 = mixed(rng, g, 1);
  GridRegulated w1 = mixed(rng, g, 2), w2 = mixed(rng, g, 5);
  double i11 = ks_integrate(f1, w1, 0.0, 2.0);
  double i21 = ks_integrate(f2, w1, 0.0, 2.0);
  double i12 = ks_integrate(f1, w2, 0.0, 2.0);
  GridRegulated fsum = add(f1, scale(f2, -2.0));
  CHECK(ks_integrate(fsum, w1, 0.0, 2.0) == doctest::Approx(i11 - 2.0 * i21).epsilon(1e-13));
  GridRegulated wsum = add(w1, scale(w2, 3.0));
  CHECK(ks_integrate(f1, wsum, 0.0, 2.0) == doctest::Approx(i11 + 3.0 * i12).epsilon(1e-13));
}

TEST_CASE("smooth against smooth reduces to the classical integral") {
  // f = t, w = t^2 on [0,1]: int t d(t^2) = int 2 t^2 dt = 2/3
  TimeGrid g = TimeGrid::uniform(1.0, 2000);
  std::vector<double> tv(g.size()), qv(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    tv[k] = g[k];
    qv[k] = g[k] * g[k];
  }
  GridRegulated f = GridRegulated::from_pl(PLFunction(g, tv));
  GridRegulated w = GridRegulated::from_pl(PLFunction(g, qv));
  CHECK(ks_integrate(f, w, 0.0, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("l2 product of piecewise linear functions is exact") {
  // int_0^1 t * t dt = 1/3 without refinement error
  TimeGrid g = TimeGrid::uniform(1.0, 3);
  std::vector<double> tv(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) tv[k] = g[k];
  PLFunction f(g, tv);
  CHECK(l2_product(f, GridRegulated::from_pl(f)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  Rng rng(3);
  PLFunction a = random_pl(rng, g, 1.0);
  PLFunction b = random_pl(rng, g, 1.0);
  // against the refinement oracle of int a(t) b(t) dt via a very fine grid
  TimeGrid fine = TimeGrid::uniform(1.0, 20000);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < fine.size(); ++k) {
    double tm = 0.5 * (fine[k] + fine[k + 1]);
    acc += a.eval(tm) * b.eval(tm) * (fine[k + 1] - fine[k]);
  }
  CHECK(l2_product(a, GridRegulated::from_pl(b)) == doctest::Approx(acc).epsilon(1e-7));
}

TEST_CASE("mismatched durations are rejected") {
  TimeGrid g1 = TimeGrid::uniform(1.0, 4), g2 = TimeGrid::uniform(2.0, 4);
  GridRegulated f = GridRegulated::constant(g1, 1.0);
  GridRegulated w = GridRegulated::constant(g2, 1.0);
  CHECK_THROWS(ks_integrate(f, w, 0.0, 1.0));
  CHECK_THROWS(ks_integrate(f, GridRegulated::constant(g1, 0.0), -0.5, 1.0));
  CHECK_THROWS(ks_integrate(f, GridRegulated::constant(g1, 0.0), 0.8, 0.2));
}
