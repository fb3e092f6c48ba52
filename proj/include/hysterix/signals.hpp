#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hysterix/grid.hpp"
#include "hysterix/hysteresis.hpp"

namespace hysterix {

using Rng = std::mt19937_64;

// C-infinity building blocks, all exactly 0 or 1 outside their transition
// windows so sampled signals keep exact flats.

// exp(-1/x) continued by 0 for x <= 0
double exp_reciprocal(double x);
// monotone 0 -> 1 on [0, 1], exactly 0 for x <= 0 and 1 for x >= 1
double smooth_step01(double x);
// monotone 0 -> 1 on [-1, 0]: step(x) = smooth_step01(x + 1)
double rising_unit_step(double x);
// symmetric bump on (0, 2) with peak value 1 at x = 1, exactly 0 outside
double unit_bump02(double x);
// travelling bump of height 2 on (0, 2): 2 * exp(1 - 1/(1 - (t-1)^2))
double bump2(double t);

PLFunction sample_pl(const TimeGrid& grid, double (*fn)(double));
PLFunction sample_sin(const TimeGrid& grid);

// ---- randomized instances (all driven by a caller-owned Rng) ----

TimeGrid random_grid(Rng& rng, double T, std::size_t intervals, double jitter = 0.3);
// iid node values in [-amp, amp]
PLFunction random_pl(Rng& rng, const TimeGrid& grid, double amp);
// random walk with steps in [-step, step], starting at start
PLFunction random_walk_pl(Rng& rng, const TimeGrid& grid, double start, double step);
// regulated function with linear interiors and jump nodes with probability p
GridRegulated random_regulated(Rng& rng, const TimeGrid& grid, double amp, double jump_prob);
// right-continuous piecewise constant function, values in [-amp, amp]
GridRegulated random_rc_step(Rng& rng, const TimeGrid& grid, double amp);
// regulated g with countable (node-only) support: limits 0 everywhere,
// nonzero values at some interior nodes, g(0) = g(T) = 0
GridRegulated random_node_supported(Rng& rng, const TimeGrid& grid, double amp);
// nondecreasing piecewise linear reparameterization of [0, T] onto itself
PLFunction random_reparam(Rng& rng, const TimeGrid& grid);

// Right-continuous z respecting the regime cones of cls: zero on strictly
// active nodes and intervals, sign-projected at biactive nodes, optional
// jumps that land exactly at 0.
GridRegulated random_cone_feasible(Rng& rng, const RegimeClassification& cls, double amp,
                                   bool with_jumps);

// Piecewise linear direction respecting the node cones (used as a test
// function family for the derivative variational inequality).
PLFunction random_cone_feasible_pl(Rng& rng, const RegimeClassification& cls, double amp);

}  // namespace hysterix
