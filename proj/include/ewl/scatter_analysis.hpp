#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ewl/field_core.hpp"
#include "ewl/linear_radiation.hpp"

namespace ewl {

enum class Direction { Positive, Negative };

/// Radiation profile of a nonlinear run read off at a sequence of probe times.
struct ProfileEstimate {
  RadiationProfile G;  ///< G^+ for the positive direction, G_- for the negative one
  Direction direction = Direction::Positive;
  std::optional<double> R_restrict;
  std::vector<double> probe_times;
  std::vector<double> discrepancy;  ///< L^2 distance between the r u_t and -r u_r probes per probe time
  std::vector<double> change;       ///< relative L^2 change of the estimate between successive probes
  bool converged = false;
};

/// Reads the profile of the free wave that matches the solution at each probe
/// time (the profile of the current state, translated by t). For free waves
/// every probe returns the exact profile; for scattering solutions the
/// estimates converge as |t| grows. Positive direction needs a forward run,
/// negative a backward run. With R_restrict, s <= R is zeroed and the probes
/// only look at r > |t| + R. Probe times default to T/4, T/2, T.
ProfileEstimate extract_profile(const Trajectory& traj, Direction direction,
                                std::optional<double> R_restrict = std::nullopt,
                                std::vector<double> probe_times = {}, double tol = 1e-2);

/// Negative-direction profile of the free wave with the estimated profile.
RadiationProfile negative_profile(const ProfileEstimate& est);

/// The free wave with the estimated profile, sampled on the trajectory's
/// grid at its frame times.
Trajectory free_wave_like(const ProfileEstimate& est, const Trajectory& like);

/// The free wave that coincides with the final frame, evolved backwards by
/// the same scheme; its frames line up with those of traj. Discretization
/// error largely cancels against the forward run, unlike the closed form.
Trajectory free_wave_through_final(const Trajectory& traj);

struct ResidualCurve {
  std::vector<double> times;
  std::vector<double> values;  ///< ||grad_{t,x}(u - v)(t)||^2 over |x| > |t| + R

  /// Strictly decreasing, except that values at or below `floor` count as
  /// settled (the discretization floor of the comparison).
  bool decreasing(double floor = 0.0) const;
  /// True iff the curve is decreasing and its last value is below tol.
  bool equivalent(double tol, double floor = 0.0) const;
};

/// Residual at every common frame, or at the frames closest to `at` if given.
ResidualCurve equiv_residual(const Trajectory& u, const Trajectory& v, double R,
                             const std::vector<double>& at = {});

struct CharacteristicNumber {
  double alpha_fit = 0.0;
  double alpha_int = 0.0;
  double agreement = 0.0;     ///< relative difference of the two estimates
  double fit_residual = 0.0;  ///< rms deviation of r (u - v) from its mean, relative
  double tail_bound = 0.0;    ///< estimate of the part of int (G - G~) beyond the grid
  bool reliable = false;
};

/// Characteristic number of u with respect to v from a least-squares fit of
/// r (u - v) to a constant on the window (default [0.5, 0.9] r_max), and from
/// int (G - G~) ds over the resolved range.
CharacteristicNumber characteristic_number(const RadialState& u, const RadialState& v,
                                           std::optional<std::pair<double, double>> window = std::nullopt,
                                           double noise_threshold = 1e-2);

enum class VerdictKind { Scatters, Undecided, Blowup };
std::string to_string(VerdictKind v);

struct ScatterOptions {
  double y_fraction_tol = 0.05;  ///< last dyadic window's share of Y^5
  double residual_tol = 0.01;    ///< final residual relative to the initial exterior energy^2
  int checkpoints = 5;           ///< residual checkpoints T/2^k, k = 1..checkpoints
  double residual_floor = 1e-6;  ///< relative to the initial exterior energy^2; below it the residual is noise
};

struct ScatterVerdict {
  VerdictKind kind = VerdictKind::Undecided;
  std::vector<double> window_y5;  ///< Y^5 over [T/2^{k+1}, T/2^k], latest window first
  double last_window_fraction = 1.0;
  ResidualCurve residual;         ///< against the free wave through the final frame
  double initial_energy_sq = 0.0;
  std::string reason;
};

ScatterVerdict scattering_verdict(const Trajectory& traj, double R, const ScatterOptions& opts = {});

/// Frames of traj with |t| in [a, b].
Trajectory time_window(const Trajectory& traj, double a, double b);

}  // namespace ewl
