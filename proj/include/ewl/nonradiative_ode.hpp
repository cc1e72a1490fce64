#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ewl/field_core.hpp"
#include "ewl/nonlinearity.hpp"

namespace ewl {

/// Static tail of a non-radiative solution on [R_start, R_far]:
///   w(r) = alpha - int_r^inf (tau - r) tau F(tau, w(tau)/tau) dtau,
/// with w frozen at its R_far value beyond R_far.
struct TailSolution {
  double alpha = 0.0;
  double R_start = 0.0;
  double R_far = 0.0;
  std::vector<double> r;    ///< log-spaced, increasing
  std::vector<double> w;
  std::vector<double> w_r;
  int iterations = 0;
  std::vector<double> history;  ///< sup-norm change per iteration
  double contraction_ratio = 0.0;  ///< largest measured ratio of successive changes
  double residual = 0.0;          ///< last sup-norm change
  double truncation_bound = 0.0;  ///< bound on the error of freezing w beyond R_far

  double w0() const { return w.front(); }
  double w0_r() const { return w_r.front(); }
};

/// 4 max(1, sqrt(16 gamma / 3)) (1 + alpha^2).
double default_R_start(double gamma, double alpha);

/// Picard iteration of the tail map. Throws NumericalError if the map does
/// not contract (advising a larger R_start).
TailSolution tail_fixed_point(const Nonlinearity& F, double alpha, std::optional<double> R_start = std::nullopt,
                              double tol = 1e-13, int max_iter = 200);

enum class BranchClass { Global, Blowup };
enum class BlowupReason { None, Cap, StepUnderflow, SingularAtOrigin };

std::string to_string(BranchClass c);
std::string to_string(BlowupReason r);

struct NonradiativeBranch {
  double alpha = 0.0;
  /// Inward ODE samples, r decreasing from R_start.
  std::vector<double> r;
  std::vector<double> w;
  std::vector<double> w_r;
  /// e(r) = int_r^{R_start} 4 pi (w_r - w/r)^2 dr, the Hdot^1 energy of (r, R_start).
  std::vector<double> e;
  double R_alpha = 0.0;
  BranchClass classification = BranchClass::Global;
  BlowupReason reason = BlowupReason::None;
  double central_slope = 0.0;  ///< kappa = lim_{r->0} w_r (global case)
  double R_start = 0.0;
  double trust_radius = 0.0;   ///< smallest radius at which samples are trusted
  TailSolution tail;

  /// w by Hermite interpolation anywhere in [trust_radius, inf).
  double w_at(double r) const;
  double w_r_at(double r) const;
};

/// Backward integration of w_rr = -r F(r, w/r) from the tail values, by an
/// embedded Runge-Kutta (Dormand-Prince 5(4)) pair at relative tolerance 1e-8.
NonradiativeBranch integrate_inward(const Nonlinearity& F, const TailSolution& tail, double r_end = 1e-6,
                                    double cap = 1e6);

/// tail_fixed_point followed by integrate_inward.
NonradiativeBranch nonradiative_branch(const Nonlinearity& F, double alpha,
                                       std::optional<double> R_start = std::nullopt);

/// ||u^alpha||_{Hdot^1(|x| > R)}, including 4 pi alpha^2 / R_far for r > R_far.
double tail_energy(const NonradiativeBranch& branch, double R);

/// Radius where tail_energy equals A, by bisection in log R to 1e-6 relative.
double radius_for_target(const NonradiativeBranch& branch, double A);

struct GroundStateReference {
  RadialState state;
  double residual = 0.0;  ///< max |w_rr + r u^5| with second differences
};

/// u^alpha = (1/alpha) (1/3 + r^2/alpha^4)^{-1/2}, u_t = 0.
GroundStateReference ground_state_reference(double alpha, const RadialGrid& grid);
double ground_state_value(double alpha, double r);

/// Samples the branch (interior clamped below R) on a uniform grid.
RadialState branch_state(const NonradiativeBranch& branch, const RadialGrid& grid, double R);

struct StaticCheck {
  double max_deviation = 0.0;  ///< max_t ||(u(t) - u(0), u_t(t))||_{H_{|t|+R}}
  double exterior_energy = 0.0;  ///< ||(u(0), 0)||_{H_R}
  double relative() const { return exterior_energy > 0.0 ? max_deviation / exterior_energy : max_deviation; }
};

/// Evolves the branch on Omega_R for time T (whole space when R = 0) and
/// reports the largest exterior deviation from the initial state.
StaticCheck static_evolution_check(const NonradiativeBranch& branch, const Nonlinearity& F, double R, double T,
                                   double h);

}  // namespace ewl
