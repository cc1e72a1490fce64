#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ewl/field_core.hpp"

namespace ewl {

/// Radiation profile G(s) sampled on a uniform grid in retarded time s.
/// Values outside [s_min, s_max] are taken to be zero. Unless a function
/// says otherwise the profile is the one of the negative time direction, so
/// that the free wave is u(r,t) = (1/r) int_{t-r}^{t+r} G(s) ds.
class RadiationProfile {
 public:
  RadiationProfile(double s_min, double s_max, std::vector<double> values);

  static RadiationProfile zero(double s_min, double s_max, std::size_t n);
  static RadiationProfile sample(double s_min, double s_max, std::size_t n,
                                 const std::function<double(double)>& g);

  double s_min() const { return s_min_; }
  double s_max() const { return s_max_; }
  std::size_t n() const { return values_.size(); }
  double h() const { return h_; }
  double s(std::size_t k) const { return s_min_ + static_cast<double>(k) * h_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }

  /// Piecewise-linear interpolant, zero outside the declared range.
  double at(double s) const;
  /// int_{s_min}^{s} of the interpolant (trapezoid-exact at nodes).
  double antiderivative(double s) const;
  double integral(double a, double b) const { return antiderivative(b) - antiderivative(a); }
  double integral() const { return cumulative_.back(); }

  /// ||G||_{L^2(a,b)} by the trapezoid rule on G^2.
  double l2_norm(double a, double b) const;
  double l2_norm() const { return l2_norm(s_min_, s_max_); }
  /// int_a^b |G| ds.
  double l1_norm(double a, double b) const;

  RadiationProfile resampled(double s_min, double s_max, std::size_t n) const;
  bool same_grid(const RadiationProfile& other) const;

  RadiationProfile& operator+=(const RadiationProfile& other);
  RadiationProfile& operator-=(const RadiationProfile& other);
  RadiationProfile& operator*=(double c);

 private:
  void rebuild();

  double s_min_;
  double s_max_;
  double h_;
  std::vector<double> values_;
  std::vector<double> cumulative_;
};

RadiationProfile operator+(RadiationProfile a, const RadiationProfile& b);
RadiationProfile operator-(RadiationProfile a, const RadiationProfile& b);
RadiationProfile operator*(double c, RadiationProfile a);

struct ProfileDiagnostics {
  double roundtrip_residual = 0.0;  ///< relative H-norm residual of data -> G -> data
  bool coarse_warning = false;
};

/// Radiation profile of the data (u0, u1) = (state.u, state.ut):
///   G(r)  = [(r u0)'(r) + r u1(r)] / 2,   G(-r) = [(r u0)'(r) - r u1(r)] / 2.
/// The grid must start at r = 0; the profile lives on [-r_max, r_max].
RadiationProfile profile_from_data(const RadialState& state, ProfileDiagnostics* diag = nullptr,
                                   double warn_threshold = 1e-2);

/// Cauchy data at t = 0 of the free wave with profile G.
RadialState data_from_profile(const RadiationProfile& G, const RadialGrid& grid);

struct PropagatorDiagnostics {
  double uncovered_extent = 0.0;  ///< length of [t - r_max, t + r_max] outside the profile range
};

/// Closed-form radial free wave:
///   u(r,t) = (1/r) int_{t-r}^{t+r} G,   u_t(r,t) = (G(t+r) - G(t-r)) / r.
RadialState linear_evolve(const RadiationProfile& G, double t, const RadialGrid& grid,
                          PropagatorDiagnostics* diag = nullptr);

/// Frames of the closed-form free wave at the given (uniformly spaced) times.
Trajectory linear_trajectory(const RadiationProfile& G, const RadialGrid& grid,
                             std::span<const double> times);

/// Positive-direction profile G_+(s) = -G_-(-s).
RadiationProfile plus_profile(const RadiationProfile& G);

/// 8 pi ||G||^2_{L^2(R)} = ||(u0, u1)||^2_{Hdot^1 x L^2}.
double profile_energy(const RadiationProfile& G);

/// Smooth random profile supported in [a, b]: a few random Fourier modes under
/// a C^infinity bump window, scaled to unit L^2 norm. Deterministic in seed.
RadiationProfile random_smooth_profile(std::uint64_t seed, double s_min, double s_max,
                                       std::size_t n, double a, double b, int modes = 4);

}  // namespace ewl
