#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>

#include "ewl/field_core.hpp"
#include "ewl/nonlinearity.hpp"

namespace ewl {

struct EvolveOptions {
  /// Upper bound on dt / h. At exactly 1 the scheme is the characteristic
  /// (diamond) scheme: exact for the free 1D wave and strictly causal.
  double cfl = 1.0;
  /// Runs stop once |w| exceeds this in the authoritative region.
  double blowup_cap = 1e6;
  /// Keep every k-th time level as a frame.
  std::size_t store_every = 1;
};

/// How the interior {r < R} of exterior data is filled before evolving.
enum class InteriorFill {
  Clamp,    ///< u = u(R), u_t = 0 inside
  AsGiven,  ///< keep the supplied interior values
};

/// Solves w_tt - w_rr = r F(r, t, w/r), w = r u, by leapfrog with w(0,t) = 0
/// and held outer boundary values. T may be negative (backward run). The
/// outer boundary is not transparent: r_max must exceed the data support
/// plus |T| for the solution to be free of boundary effects.
Trajectory evolve(const RadialState& data, const Nonlinearity& F, double T, double dt,
                  const EvolveOptions& opts = {});

/// Exterior problem in Omega_R = {r > |t| + R}: the source is multiplied by
/// the indicator of Omega_R and only r > |t| + R is authoritative.
Trajectory evolve_exterior(const RadialState& data, const Nonlinearity& F, double R, double T,
                           double dt, const EvolveOptions& opts = {},
                           InteriorFill fill = InteriorFill::Clamp);

/// Linear wave with a prescribed source: u_tt - Δu = source(r, t).
Trajectory duhamel_linear(const RadialState& data, const std::function<double(double r, double t)>& source,
                          double T, double dt, const EvolveOptions& opts = {});

/// Applies the exterior interior fill to a state.
RadialState clamp_interior(const RadialState& data, double R);

enum class ConvergenceVerdict { Pass, Inconclusive, Fail };

struct ConvergenceStudy {
  double h = 0.0;                       ///< coarsest spacing
  std::array<double, 2> differences{};  ///< max-norm differences of (u, u_t) between successive levels
  double order = 0.0;
  ConvergenceVerdict verdict = ConvergenceVerdict::Inconclusive;
};

/// Richardson self-convergence from three runs at h, h/2, h/4 (dt = cfl h).
/// Passes iff the observed order is >= 1.8; non-monotone differences or a
/// degraded order (e.g. data with kinks) are inconclusive.
ConvergenceStudy self_convergence(const std::function<RadialState(const RadialGrid&)>& data,
                                  const Nonlinearity& F, double T, double r_max, double h,
                                  const EvolveOptions& opts = {});

std::string to_string(ConvergenceVerdict v);

}  // namespace ewl
