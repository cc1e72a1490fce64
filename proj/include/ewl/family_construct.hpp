#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ewl/field_core.hpp"
#include "ewl/linear_radiation.hpp"
#include "ewl/nonlinearity.hpp"

namespace ewl {

struct IterationRecord {
  int iteration = 0;
  double profile_change_l2 = 0.0;
  double probe_discrepancy = 0.0;
  double ratio = 0.0;  ///< change / previous change; 0 on the first iteration
};

struct ConstructOptions {
  double h = 0.05;
  double probe_time = 30.0;  ///< nonlinear profiles are read off at +-probe_time
  double r_max = 0.0;        ///< 0: chosen from the probe time and the profile support
  double theta = 1.0;        ///< damping, G <- (1 - theta) G + theta T(G)
  int max_iter = 50;
  double tol = 1e-6;         ///< stop when the change is below tol * ||G||
  /// Smallness threshold on ||chi_R v_L||_Y. The default is the largest value
  /// at which all 20 random test profiles contracted (see the decisions log).
  double delta = 0.9;
  /// Starting iterate for G (resampled to the working grid, zeroed on
  /// |s| <= R); zero if empty.
  std::optional<RadiationProfile> initial_guess;
};

struct PrimaryResult {
  RadialState state;           ///< Cauchy data at t = 0; authoritative for r > R
  RadiationProfile G;          ///< profile of (u0 - v0, u1 - v1)
  RadiationProfile G0;         ///< profile of v_L on the working grid
  double R = 0.0;
  double probe_time = 0.0;
  double y_norm_vL = 0.0;      ///< ||chi_R v_L||_Y over [-T, T]
  double difference_norm = 0.0;  ///< ||(u0, u1) - (v0, v1)||_{Hdot^1 x L^2}
  double fixed_point_residual = 0.0;
  double contraction_ratio = 0.0;  ///< largest ratio seen after the first iteration
  std::vector<IterationRecord> history;
};

/// Exterior solution on Omega_R that is R-weakly asymptotically equivalent to
/// the free wave with profile vL, as the fixed point of the profile map
///   (T G)(s) = G - G^- + G0 (s > R),  0 (|s| <= R),  G + G^+(-s) + G0 (s < -R),
/// evaluated in difference form: the nonlinear profiles are measured relative
/// to the free evolution of the same data by the same scheme.
/// Throws ContractError if ||chi_R v_L||_Y >= delta, NumericalError on
/// expansion, max_iter or blow-up.
PrimaryResult construct_primary(const RadiationProfile& vL, const Nonlinearity& F, double R,
                                const ConstructOptions& opts = {});

struct AlphaOptions {
  double probe_time = 0.0;  ///< 0: 2^N
  double theta = 1.0;
  int max_iter = 50;
  double tol = 1e-6;
  double n_factor = 10.0;        ///< 2^N >= n_factor (1 + sqrt(gamma)) (1 + alpha^2)
  double c = 1.0;                ///< c sum_{j>=N} b_j^4 < tail_threshold
  double tail_threshold = 1e-2;
};

/// A solution known on Omega_R, represented by Cauchy data at t = 0 whose
/// global extension solves the equation with F cut off inside the cone.
struct BaseSolution {
  RadialState data;
  double R = 0.0;
};

struct AlphaResult {
  RadialState state;  ///< data at t = 0; authoritative for r > R_N
  RadiationProfile G;  ///< profile of the difference to the base data, filled inside |s| <= 2^N
  int N = 0;
  double R_N = 0.0;
  double probe_time = 0.0;
  double channel_tail = 0.0;  ///< sum_{j >= N} b_j^4 of the base
  double fixed_point_residual = 0.0;
  double contraction_ratio = 0.0;
  std::vector<IterationRecord> history;

  BaseSolution as_base() const { return {state, R_N}; }
};

/// Exterior solution weakly asymptotically equivalent to the base with
/// characteristic number alpha with respect to it. The base grid must start
/// at r = 0 and reach past 2^N + probe_time.
/// Throws ContractError when no admissible N exists on the grid (naming the
/// channel tail sum), NumericalError on expansion, max_iter or blow-up.
AlphaResult construct_alpha(const BaseSolution& base, const Nonlinearity& F, double alpha,
                            const AlphaOptions& opts = {});

/// Smallest N satisfying the two selection rules, or nullopt.
std::optional<int> select_n(const std::vector<double>& b, int k_min, double gamma, double alpha,
                            const AlphaOptions& opts);

/// ||(u, u_t)||_{H_R} with the region beyond r_max completed as a pure
/// c/r tail, c = r_max u(r_max).
double exterior_energy_completed(const RadialState& state, double R);

}  // namespace ewl
