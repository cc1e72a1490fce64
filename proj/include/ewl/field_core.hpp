#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ewl {

class Nonlinearity;

/// Uniform grid on [r_min, r_max] with n samples.
class RadialGrid {
 public:
  RadialGrid(double r_min, double r_max, std::size_t n);

  /// Grid starting at r_min with spacing h; r_max is rounded up to a whole
  /// number of cells.
  static RadialGrid with_spacing(double r_min, double r_max, double h);

  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  std::size_t n() const { return n_; }
  double h() const { return h_; }
  double r(std::size_t i) const { return r_min_ + static_cast<double>(i) * h_; }
  bool touches_origin() const { return r_min_ == 0.0; }
  std::vector<double> radii() const;

  /// Index of the first node with r >= x (n() if none).
  std::size_t lower_index(double x) const;

  bool operator==(const RadialGrid& other) const = default;

 private:
  double r_min_;
  double r_max_;
  std::size_t n_;
  double h_;
};

/// A value together with an a-posteriori quadrature error estimate
/// (difference between full- and half-resolution evaluation).
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Radial Cauchy data (u, u_t) sampled on a grid at time t.
struct RadialState {
  RadialGrid grid;
  std::vector<double> u;
  std::vector<double> ut;
  double t = 0.0;

  static RadialState zero(const RadialGrid& grid, double t = 0.0);

  template <class U, class Ut>
  static RadialState sample(const RadialGrid& grid, U&& u_of_r, Ut&& ut_of_r, double t = 0.0) {
    RadialState s = zero(grid, t);
    for (std::size_t i = 0; i < grid.n(); ++i) {
      s.u[i] = u_of_r(grid.r(i));
      s.ut[i] = ut_of_r(grid.r(i));
    }
    return s;
  }

  /// Throws ContractError on length mismatch or non-finite samples.
  void validate() const;

  /// w = r u.
  std::vector<double> w() const;
};

RadialState operator-(const RadialState& a, const RadialState& b);
RadialState operator+(const RadialState& a, const RadialState& b);
RadialState operator*(double c, const RadialState& a);

/// Location of the first sample that exceeded the blow-up cap.
struct BlowupReport {
  double t = 0.0;
  double r = 0.0;
  bool authoritative = true;
};

/// Time-ordered frames of one evolution. Times are strictly monotone:
/// increasing for forward runs, decreasing for backward runs.
struct Trajectory {
  std::vector<RadialState> states;
  double dt = 0.0;  ///< spacing between stored frames (signed)
  std::optional<double> cone_origin;  ///< R of the exterior region, if any
  std::optional<BlowupReport> blowup;
  std::string scheme = "leapfrog-w";
  std::string source_descriptor = "zero";

  const RadialGrid& grid() const;
  std::vector<double> times() const;
  bool empty() const { return states.empty(); }
  const RadialState& back() const { return states.back(); }

  /// True where the value at (r, t) is determined by the exterior problem
  /// alone: r > |t| + R, or everywhere for whole-space runs.
  bool authoritative(double r, double t) const;

  /// Throws ContractError if frames disagree on grid or spacing.
  void validate() const;
};

/// Membership of (r, t) in the open exterior region {r > |t| + R}, robust
/// to rounding for nodes lying on the cone.
bool in_exterior(double r, double t, double R);

/// Centered differences in the interior, second-order one-sided at the ends.
std::vector<double> radial_derivative(std::span<const double> f, const RadialGrid& grid);

/// Trapezoid value of the integral of f(r) 4 pi r^2 dr over the grid.
double quad_radial(std::span<const double> f, const RadialGrid& grid);

/// Trapezoid integral of the piecewise-linear interpolant of g over
/// [a, b] intersected with the grid (no radial weight).
double integrate_interval(std::span<const double> g, const RadialGrid& grid, double a, double b);

/// Pointwise energy density r^2 (u_r^2 + u_t^2) (without the 4 pi), with u_r
/// obtained from the w = r u form; vanishes at r = 0.
std::vector<double> energy_density(const RadialState& state);

/// ||(u, u_t)||_{H_R}: the Hdot^1 x L^2 norm over {|x| > R} on the grid.
Estimate exterior_energy(const RadialState& state, double R);

/// E = int (|grad u|^2/2 + u_t^2/2 + V(r, u)) dx over the grid.
double conserved_energy(const RadialState& state, const Nonlinearity& F);

}  // namespace ewl
