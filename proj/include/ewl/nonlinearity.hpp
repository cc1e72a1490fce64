#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace ewl {

/// Structural assumptions the nonlinear term is declared to satisfy.
struct NonlinearityFlags {
  bool radial = true;      // F depends on x only through |x|
  bool growth = true;      // |F(x,t,u)| <= gamma |u|^5
  bool autonomous = true;  // no explicit t-dependence
  bool difference = true;  // Lipschitz-type difference bound
  bool defocusing = false; // u F(x,u) <= 0
};

struct AssumptionReport {
  int samples = 0;
  int growth_violations = 0;
  int defocusing_violations = 0;
  double worst_growth_ratio = 0.0;  ///< max |F| / (gamma |u|^5)
  bool ok() const { return growth_violations == 0 && defocusing_violations == 0; }
};

/// Nonlinear term F(r, t, u) of the radial equation u_tt - Δu = F.
class Nonlinearity {
 public:
  using Eval = std::function<double(double r, double t, double u)>;
  using Potential = std::function<double(double r, double u)>;

  Nonlinearity(std::string name, double gamma, Eval eval, std::optional<Potential> potential,
               NonlinearityFlags flags);

  static Nonlinearity zero();
  /// F = +|u|^4 u.
  static Nonlinearity focusing_quintic();
  /// F = -|u|^4 u.
  static Nonlinearity defocusing_quintic();
  /// F = c(r) |u|^4 u with |c| <= gamma.
  static Nonlinearity weighted_power(std::function<double(double)> c, double gamma,
                                     std::string label, bool defocusing);
  /// Built-in by name: zero, focusing_quintic, defocusing_quintic,
  /// weighted_power (c(r) = -gamma / (1 + r^2), defocusing).
  static Nonlinearity from_name(const std::string& name, double gamma = 1.0);

  double operator()(double r, double t, double u) const { return eval_(r, t, u); }

  bool has_potential() const { return potential_.has_value(); }
  /// V(r, u) = -int_0^u F(r, v) dv. Throws UnsupportedOperation without one.
  double potential(double r, double u) const;

  double gamma() const { return gamma_; }
  const NonlinearityFlags& flags() const { return flags_; }
  const std::string& name() const { return name_; }
  bool is_zero() const { return zero_; }

  /// Random spot check of the growth bound and, if flagged, the defocusing sign.
  AssumptionReport spot_check(std::uint64_t seed = 0, int samples = 2000) const;

 private:
  std::string name_;
  double gamma_;
  Eval eval_;
  std::optional<Potential> potential_;
  NonlinearityFlags flags_;
  bool zero_ = false;
};

}  // namespace ewl
