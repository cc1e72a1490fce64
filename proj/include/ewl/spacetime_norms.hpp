#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ewl/field_core.hpp"
#include "ewl/nonlinearity.hpp"

namespace ewl {

/// Space-time region, each slice {|t| + inner < r < |t| + outer}.
struct RegionSpec {
  enum class Kind { Exterior, Annulus, Channel };
  Kind kind = Kind::Exterior;
  double inner = 0.0;
  double outer = 0.0;  ///< unused for Exterior

  static RegionSpec exterior(double R);
  static RegionSpec annulus(double r, double R);
  /// {|t| + R < r < |t| + 2R}.
  static RegionSpec channel(double R);

  bool bounded() const { return kind != Kind::Exterior; }
  bool contains(double r, double t) const;
  std::string describe() const;
};

struct NormResult {
  double value = 0.0;
  double error = 0.0;           ///< |full - half-resolution| estimate
  double clipped_extent = 0.0;  ///< largest radial overshoot of the region past r_max
};

/// ||u||_{Y} = ||u||_{L^5_t L^10_x} over the region, with the trajectory's
/// span standing in for the time line. Exterior regions end at r_max.
/// Throws ContractError if the region reaches below r_min or into the
/// non-authoritative part of an exterior run.
NormResult y_norm(const Trajectory& traj, const RegionSpec& region);

struct ChannelNorms {
  int k_min = 0;
  std::vector<double> b;  ///< b[k - k_min] = y_norm over Channel(2^k)
  std::vector<double> clipped;
  double sum_squares = 0.0;

  double at(int k) const { return b.at(static_cast<std::size_t>(k - k_min)); }
  int k_max() const { return k_min + static_cast<int>(b.size()) - 1; }
  /// sum_{j >= N} b_j^4 over the computed range.
  double tail_sum_fourth(int N) const;
};

ChannelNorms dyadic_channel_norms(const Trajectory& traj, int k_min, int k_max);

using SourceField = std::function<double(double r, double t, double u)>;

/// ||chi F(., t, u)||_{L^1_t L^2_x} over the region.
NormResult source_l1l2_norm(const Trajectory& traj, const Nonlinearity& F, const RegionSpec& region);
NormResult source_l1l2_norm(const Trajectory& traj, const SourceField& F, const RegionSpec& region);

}  // namespace ewl
