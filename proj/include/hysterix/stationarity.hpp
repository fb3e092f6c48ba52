#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hysterix/sensitivity.hpp"

namespace hysterix {

// Membership test in the reduced cone of admissible right-continuous
// variations: z right-continuous, z(0) = 0, node and interval values in the
// regime cones, z = 0 at its own jump times, and the orthogonality integral
// of z against y - u over [0, T] vanishes.
struct MembershipResult {
  bool member = false;
  std::vector<std::string> reasons;
  double criticality_integral = 0.0;
};

MembershipResult reduced_cone_membership(const GridRegulated& z, const StopSolution& sol,
                                         const HysteresisConfig& cfg);

struct RadialOptions {
  double alpha_max = 1.0;
  // Smallest step size that counts. Zero (the default) accepts any positive
  // step; negative means automatic (the coarsest spacing of the evaluation
  // grid, a conservative grid-resolution rule).
  double alpha_floor = 0.0;
};

// Largest alpha in (0, alpha_max] with y + alpha z inside [-r, r] on the
// grid, for node-wise critical z with z(0) = 0. Returns nothing when no alpha
// above the floor exists.
std::optional<double> radial_membership(const PLFunction& z, const StopSolution& sol,
                                        const HysteresisConfig& cfg, RadialOptions opt = {});

// Constructive two-level approximation of a reduced-cone direction z:
// z_j replaces z by a finite sum of smooth bumps anchored at cover centers
// (jump centers keep a sharp left-sided indicator), with sup error <= 1/j;
// z_ij additionally mollifies each indicator with a cutoff of width 2/i so
// that every z_ij is smooth and stays in the radial cone.
struct PolyhedricApprox {
  GridRegulated z_j;
  std::vector<PLFunction> z_ij;   // one per requested i
  std::vector<int> i_list;
  double xi = 0.0;                // 1/j
  std::size_t center_count = 0;
  std::size_t jump_center_count = 0;
};

PolyhedricApprox polyhedric_approx(const GridRegulated& z, int j, std::span<const int> i_list,
                                   const StopSolution& sol, const HysteresisConfig& cfg);

// Smooth one-parameter probe h_i(s) = c * step(i (s - t)) rising on
// (t - 1/i, t), sampled onto the trajectory grid. c must lie in the polar
// cone of the regime at t.
PLFunction polar_probe(double t, double c, int i, const StopSolution& sol,
                       const HysteresisConfig& cfg);

// Gradient data of the tracking objective at a control u: an integrable
// density d1 against the state, a terminal weight d2, and node coefficients
// d3 representing the control-space inner product so that the pairing with a
// direction h is sum_k d3_k h(t_k).
struct ObjectiveGradient {
  double value = 0.0;
  PLFunction d1;
  double d2 = 0.0;
  TimeGrid grid;             // nodes carrying d3
  std::vector<double> d3;
  double scale() const;      // 1 + norm of the gradient data, used for tolerances
};

struct BouligandResult {
  double min_value = 0.0;    // smallest directional derivative over the family
  std::size_t argmin = 0;
  std::vector<double> values;
};

// Directional derivative of the reduced objective along each sampled
// direction: pairing of d1 with the state derivative, terminal term, and the
// control term. Nonnegative over a rich family certifies directional
// stationarity.
BouligandResult bouligand_residual(const PLFunction& u, const ObjectiveGradient& grad,
                                   std::span<const PLFunction> directions,
                                   const HysteresisConfig& cfg, Exec exec = Exec::Parallel);

// Multiplier acting on regulated test functions as a sum of node atoms plus
// an integral against a piecewise linear density.
struct Multiplier {
  TimeGrid grid;
  std::vector<double> atoms;
  PLFunction density;
  double apply(const GridRegulated& z) const;
};

struct AdjointPair {
  GridRegulated p;   // left-continuous, piecewise constant, p(0) = 0
  Multiplier mu;
};

// Builds the adjoint state whose node jumps realize the control gradient
// coefficients, p(t_k+) - p(t_k-) = d3_k, together with the multiplier
// mu(z) = int z dp + int d1 z dt + d2 z(T).
AdjointPair build_adjoint(const ObjectiveGradient& grad);

// q = p + d2 * (indicator of {T}); the equivalent form of the system.
GridRegulated modified_adjoint(const AdjointPair& pair, const ObjectiveGradient& grad);

struct LineReport {
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string worst;          // witness description
  std::size_t family_size = 0;
};

struct StationarityReport {
  std::vector<LineReport> lines;      // the five conditions
  bool pass = false;                  // all five lines
  std::optional<double> terminal_jump_residual;  // only when T is inactive
  double terminal_jump_tol = 0.0;
  double qform_residual = 0.0;        // equivalence of the modified form
  double qform_tol = 0.0;
  std::string summary() const;
};

std::string stationarity_report_json(const StationarityReport& rep);

struct StationaritySamples {
  std::vector<GridRegulated> cone_zs;  // reduced-cone members for the sign condition
  std::vector<GridRegulated> reg_zs;   // general regulated functions for the identity line
  std::vector<PLFunction> hs;          // extra control directions
};

StationarityReport check_strong_stationarity(const StopSolution& sol, const HysteresisConfig& cfg,
                                             const AdjointPair& pair,
                                             const ObjectiveGradient& grad,
                                             const StationaritySamples& extra,
                                             double tol_rel = kTolStationarityRel,
                                             Exec exec = Exec::Parallel);

}  // namespace hysterix
