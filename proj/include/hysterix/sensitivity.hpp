#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hysterix/hysteresis.hpp"

namespace hysterix {

// Admissible-slope cone attached to a node or interval regime.
enum class Cone { Free, NonPos, NonNeg, Zero };

double cone_project(Cone c, double x);
bool cone_contains(Cone c, double x, double tol);
Cone cone_of(Regime r);
// Polar cone of the slope cone: {0} on Inactive, [0,inf) on BiactivePlus,
// (-inf,0] on BiactiveMinus, all of R on StrictlyActive.
bool polar_contains(Regime r, double c, double tol);

struct ConeSpec {
  TimeGrid grid;
  std::vector<Cone> node;
  std::vector<Cone> interval;
  static ConeSpec from(const RegimeClassification& cls);
};

// Directional derivative of the stop at u in direction h, represented by its
// right-continuous version eta. eta solves a cone-constrained sweep driven by
// h: on each open interval the state is pushed by dh and clamped to the
// interval cone, and on arrival at a node it is projected onto the node cone,
// so every jump lands exactly at 0. Kink times where the state hits a cone
// boundary inside an interval become extra nodes of eta's grid.
struct DerivativeResult {
  GridRegulated eta;
  ConeSpec cones;
  RegimeClassification regimes;
  // optional per-node limit estimate from finite differences (filled by CLI
  // and tests that ran dirdiff_fd on the same grid)
  std::optional<std::vector<double>> fd_delta;
};

DerivativeResult dirdiff_vi(const PLFunction& u, const PLFunction& h,
                            const HysteresisConfig& cfg);

// Difference quotients (stop(u + a h) - stop(u)) / a per node for each alpha.
struct FDQuotients {
  TimeGrid grid;
  std::vector<double> alphas;              // as given
  std::vector<std::vector<double>> q;      // q[i][k] for alphas[i]
  std::vector<double> limit;               // quotient at the smallest alpha
  std::vector<double> stabilization;       // per node |q_small - q_next|
  std::vector<double> richardson_slope;    // per node (q1 - q2)/(a1 - a2)
};

FDQuotients dirdiff_fd(const PLFunction& u, const PLFunction& h, const HysteresisConfig& cfg,
                       std::span<const double> alphas, Exec exec = Exec::Parallel);

struct DerivativeVIResidual {
  double min_value = 0.0;
  std::size_t argmin = 0;
  double orthogonality = 0.0;  // int_0^s eta d(eta - h), zero in exact arithmetic
};

// min over sampled z of int_0^s (z - eta) d(eta - h); z must be feasible for
// the node cones carried by the derivative.
DerivativeVIResidual derivative_vi_residual(const DerivativeResult& d, const PLFunction& h,
                                            std::span<const GridRegulated> zs, double s,
                                            Exec exec = Exec::Parallel);

}  // namespace hysterix
