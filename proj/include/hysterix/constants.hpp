#pragma once

// Default tolerances used across the library. Callers can override the ones
// that appear in option structs; these are the pinned baseline values.
namespace hysterix {

// absolute comparison of values that should agree exactly up to roundoff
inline constexpr double kTolEq = 1e-10;

// boundary detection |y| = r is scaled by r
inline constexpr double kTolActRel = 1e-9;

// constancy detection of y-u is scaled by 1 + var(y-u)
inline constexpr double kTolConstRel = 1e-9;

// directional stationarity threshold, scaled by 1 + norm of the gradient data
inline constexpr double kTolBouligandRel = 1e-6;

// per-line threshold of the stationarity system checker
inline constexpr double kTolStationarityRel = 1e-6;

}  // namespace hysterix
