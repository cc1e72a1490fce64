#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ewl/linear_radiation.hpp"

namespace ewl {

struct CheckRow {
  std::string suite;
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

/// 8 pi ||G||^2 against the data energy for `count` seeded smooth profiles
/// on an n-node grid; the 1/r tail beyond r_max is added analytically.
std::vector<CheckRow> verify_isometry(std::uint64_t seed, int count = 10, std::size_t n = 8192);

/// Energy drift of the defocusing quintic, F = 0 against the closed-form
/// propagator, and time reversal of a nonlinear run.
std::vector<CheckRow> verify_conservation(std::uint64_t seed);

/// ||chi~_{R1} u_L||_Y over both time directions for a free wave.
std::vector<double> channel_sweep(const RadiationProfile& G, const std::vector<double>& R1, double T, double h,
                                  double frame_dt);

struct DecaySuite {
  std::vector<double> R1_over_R;
  std::vector<std::vector<double>> ratios;  ///< b / ((R1/R)^{1/10} ||G||), per profile
  std::vector<double> limits;               ///< extrapolated R1 -> 0 ratio per profile
  std::vector<double> rho;                  ///< last ratio of successive increments per profile
  double C_fit = 0.0;     ///< fitted on the first half of the profiles (observed and extrapolated)
  double C_check = 0.0;   ///< the same maximum over the second half
  std::vector<double> l2_ratios;  ///< sum_k b_k^2 / ||(u0,u1)||^2 per profile
  double l2_fit = 0.0;    ///< max over the first half
  double l2_check = 0.0;  ///< max over the second half
};

/// Channel decay for profiles supported in [R, 2R] and the dyadic l^2 sum
/// for profiles supported in [-4, 4], `count` seeded profiles each. The
/// bounding constants are fitted on the first half of the profiles and
/// checked on the second half.
DecaySuite channel_decay_suite(std::uint64_t seed, int count = 10);
std::vector<CheckRow> verify_decay(std::uint64_t seed, int count = 10);

}  // namespace ewl
