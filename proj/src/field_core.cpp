#include "ewl/field_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ewl/error.hpp"
#include "ewl/nonlinearity.hpp"

namespace ewl {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double interp(std::span<const double> g, const RadialGrid& grid, double x) {
  const double pos = (x - grid.r_min()) / grid.h();
  auto i = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(grid.n() - 2)));
  const double theta = pos - static_cast<double>(i);
  return g[i] + theta * (g[i + 1] - g[i]);
}

void require_length(std::span<const double> f, const RadialGrid& grid, const char* what) {
  if (f.size() != grid.n()) {
    throw ContractError(std::string(what) + ": sample count " + std::to_string(f.size()) +
                        " does not match grid size " + std::to_string(grid.n()));
  }
}

// Every other node of the state (dropping the last node if n is even).
RadialState half_resolution(const RadialState& s) {
  const std::size_t m = (s.grid.n() - 1) / 2 + 1;
  RadialGrid g(s.grid.r_min(), s.grid.r_min() + 2.0 * s.grid.h() * static_cast<double>(m - 1), m);
  RadialState out = RadialState::zero(g, s.t);
  for (std::size_t i = 0; i < m; ++i) {
    out.u[i] = s.u[2 * i];
    out.ut[i] = s.ut[2 * i];
  }
  return out;
}

double exterior_energy_value(const RadialState& state, double R) {
  const auto e = energy_density(state);
  return std::sqrt(kFourPi * integrate_interval(e, state.grid, R, state.grid.r_max()));
}

}  // namespace

RadialGrid::RadialGrid(double r_min, double r_max, std::size_t n)
    : r_min_(r_min), r_max_(r_max), n_(n), h_(0.0) {
  if (!(r_min >= 0.0) || !(r_max > r_min)) throw ContractError("RadialGrid: need r_max > r_min >= 0");
  if (n < 2) throw ContractError("RadialGrid: need at least 2 samples");
  h_ = (r_max - r_min) / static_cast<double>(n - 1);
}

RadialGrid RadialGrid::with_spacing(double r_min, double r_max, double h) {
  if (!(h > 0.0)) throw ContractError("RadialGrid: spacing must be positive");
  const auto cells = static_cast<std::size_t>(std::ceil((r_max - r_min) / h - 1e-9));
  return RadialGrid(r_min, r_min + static_cast<double>(cells) * h, cells + 1);
}

std::vector<double> RadialGrid::radii() const {
  std::vector<double> r(n_);
  for (std::size_t i = 0; i < n_; ++i) r[i] = this->r(i);
  return r;
}

std::size_t RadialGrid::lower_index(double x) const {
  if (x <= r_min_) return 0;
  const double pos = (x - r_min_) / h_;
  auto i = static_cast<std::size_t>(std::ceil(pos - 1e-12));
  return std::min(i, n_);
}

RadialState RadialState::zero(const RadialGrid& grid, double t) {
  return RadialState{grid, std::vector<double>(grid.n(), 0.0), std::vector<double>(grid.n(), 0.0), t};
}

void RadialState::validate() const {
  require_length(u, grid, "RadialState.u");
  require_length(ut, grid, "RadialState.ut");
  for (std::size_t i = 0; i < grid.n(); ++i) {
    if (!std::isfinite(u[i]) || !std::isfinite(ut[i])) {
      throw ContractError("RadialState: non-finite sample at r = " + std::to_string(grid.r(i)));
    }
  }
}

std::vector<double> RadialState::w() const {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = grid.r(i) * u[i];
  return out;
}

RadialState operator-(const RadialState& a, const RadialState& b) {
  if (!(a.grid == b.grid)) throw ContractError("state difference: grids differ");
  RadialState out = a;
  for (std::size_t i = 0; i < a.u.size(); ++i) {
    out.u[i] -= b.u[i];
    out.ut[i] -= b.ut[i];
  }
  return out;
}

RadialState operator+(const RadialState& a, const RadialState& b) {
  if (!(a.grid == b.grid)) throw ContractError("state sum: grids differ");
  RadialState out = a;
  for (std::size_t i = 0; i < a.u.size(); ++i) {
    out.u[i] += b.u[i];
    out.ut[i] += b.ut[i];
  }
  return out;
}

RadialState operator*(double c, const RadialState& a) {
  RadialState out = a;
  for (std::size_t i = 0; i < a.u.size(); ++i) {
    out.u[i] *= c;
    out.ut[i] *= c;
  }
  return out;
}

const RadialGrid& Trajectory::grid() const {
  if (states.empty()) throw ContractError("Trajectory: no frames");
  return states.front().grid;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(states.size());
  for (const auto& s : states) t.push_back(s.t);
  return t;
}

bool Trajectory::authoritative(double r, double t) const {
  if (!cone_origin) return true;
  return in_exterior(r, t, *cone_origin);
}

bool in_exterior(double r, double t, double R) {
  // nodes on the cone itself see data at r = R and are excluded, also when
  // t carries accumulated rounding
  const double edge = std::abs(t) + R;
  return r > edge + 1e-9 * (1.0 + edge);
}

void Trajectory::validate() const {
  if (states.empty()) throw ContractError("Trajectory: no frames");
  for (std::size_t k = 1; k < states.size(); ++k) {
    if (!(states[k].grid == states[0].grid)) throw ContractError("Trajectory: frames use different grids");
    const double step = states[k].t - states[k - 1].t;
    if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
      throw ContractError("Trajectory: non-uniform or non-monotone frame spacing");
    }
  }
}

std::vector<double> radial_derivative(std::span<const double> f, const RadialGrid& grid) {
  require_length(f, grid, "radial_derivative");
  const std::size_t n = f.size();
  const double h = grid.h();
  std::vector<double> d(n);
  if (n == 2) {
    d[0] = d[1] = (f[1] - f[0]) / h;
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

double quad_radial(std::span<const double> f, const RadialGrid& grid) {
  require_length(f, grid, "quad_radial");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = grid.r(i);
    const double wgt = (i == 0 || i + 1 == f.size()) ? 0.5 : 1.0;
    acc += wgt * f[i] * r * r;
  }
  return kFourPi * grid.h() * acc;
}

double integrate_interval(std::span<const double> g, const RadialGrid& grid, double a, double b) {
  require_length(g, grid, "integrate_interval");
  a = std::max(a, grid.r_min());
  b = std::min(b, grid.r_max());
  if (!(b > a)) return 0.0;
  const std::size_t i0 = grid.lower_index(a);
  std::size_t i1 = grid.lower_index(b);  // becomes the last node <= b
  if (i1 >= grid.n()) {
    i1 = grid.n() - 1;
  } else if (grid.r(i1) > b + 1e-12 * grid.h()) {
    if (i1 == 0) return 0.0;
    --i1;
  }
  if (i0 > i1 || i0 >= grid.n()) {
    // a and b in the same cell
    return 0.5 * (b - a) * (interp(g, grid, a) + interp(g, grid, b));
  }
  double acc = 0.5 * (grid.r(i0) - a) * (interp(g, grid, a) + g[i0]);
  for (std::size_t i = i0; i < i1; ++i) acc += 0.5 * grid.h() * (g[i] + g[i + 1]);
  acc += 0.5 * (b - grid.r(i1)) * (g[i1] + interp(g, grid, b));
  return acc;
}

std::vector<double> energy_density(const RadialState& state) {
  state.validate();
  const auto w = state.w();
  const auto wr = radial_derivative(w, state.grid);
  std::vector<double> e(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double r = state.grid.r(i);
    const double grad = wr[i] - state.u[i];  // r u_r
    const double vel = r * state.ut[i];
    e[i] = grad * grad + vel * vel;
  }
  if (state.grid.touches_origin()) e[0] = 0.0;
  return e;
}

Estimate exterior_energy(const RadialState& state, double R) {
  if (R < state.grid.r_min() || R > state.grid.r_max()) {
    throw ContractError("exterior_energy: R = " + std::to_string(R) + " outside grid [" +
                        std::to_string(state.grid.r_min()) + ", " + std::to_string(state.grid.r_max()) +
                        "]; the norm is truncated at r_max and cannot start outside the grid");
  }
  Estimate est;
  est.value = exterior_energy_value(state, R);
  if (state.grid.n() >= 5) {
    const auto half = half_resolution(state);
    if (R <= half.grid.r_max()) est.error = std::abs(est.value - exterior_energy_value(half, R));
  }
  return est;
}

double conserved_energy(const RadialState& state, const Nonlinearity& F) {
  if (!F.has_potential()) {
    throw UnsupportedOperation("conserved_energy: nonlinearity '" + F.name() + "' supplies no potential");
  }
  auto e = energy_density(state);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double r = state.grid.r(i);
    e[i] = 0.5 * e[i] + r * r * F.potential(r, state.u[i]);
  }
  return kFourPi * integrate_interval(e, state.grid, state.grid.r_min(), state.grid.r_max());
}

}  // namespace ewl
