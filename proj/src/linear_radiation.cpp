#include "ewl/linear_radiation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ewl/error.hpp"

namespace ewl {

RadiationProfile::RadiationProfile(double s_min, double s_max, std::vector<double> values)
    : s_min_(s_min), s_max_(s_max), h_(0.0), values_(std::move(values)) {
  if (!(s_max > s_min)) throw ContractError("RadiationProfile: need s_max > s_min");
  if (values_.size() < 2) throw ContractError("RadiationProfile: need at least 2 samples");
  for (double v : values_) {
    if (!std::isfinite(v)) throw ContractError("RadiationProfile: non-finite sample");
  }
  h_ = (s_max_ - s_min_) / static_cast<double>(values_.size() - 1);
  rebuild();
}

RadiationProfile RadiationProfile::zero(double s_min, double s_max, std::size_t n) {
  return RadiationProfile(s_min, s_max, std::vector<double>(n, 0.0));
}

RadiationProfile RadiationProfile::sample(double s_min, double s_max, std::size_t n,
                                          const std::function<double(double)>& g) {
  std::vector<double> v(n);
  const double h = (s_max - s_min) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) v[k] = g(s_min + static_cast<double>(k) * h);
  return RadiationProfile(s_min, s_max, std::move(v));
}

void RadiationProfile::rebuild() {
  cumulative_.assign(values_.size(), 0.0);
  for (std::size_t k = 1; k < values_.size(); ++k) {
    cumulative_[k] = cumulative_[k - 1] + 0.5 * h_ * (values_[k - 1] + values_[k]);
  }
}

double RadiationProfile::at(double s) const {
  if (s < s_min_ || s > s_max_) return 0.0;
  const double pos = (s - s_min_) / h_;
  const auto k = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
  const double theta = pos - static_cast<double>(k);
  return values_[k] + theta * (values_[k + 1] - values_[k]);
}

double RadiationProfile::antiderivative(double s) const {
  if (s <= s_min_) return 0.0;
  if (s >= s_max_) return cumulative_.back();
  const double pos = (s - s_min_) / h_;
  const auto k = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
  const double theta = pos - static_cast<double>(k);
  const double g0 = values_[k];
  const double g1 = values_[k + 1];
  return cumulative_[k] + h_ * theta * (g0 + 0.5 * theta * (g1 - g0));
}

double RadiationProfile::l2_norm(double a, double b) const {
  a = std::max(a, s_min_);
  b = std::min(b, s_max_);
  if (!(b > a)) return 0.0;
  // Trapezoid on G^2 over whole cells plus linear pieces at the ends.
  auto sq = [&](double s) { const double g = at(s); return g * g; };
  const auto k0 = static_cast<std::size_t>(std::ceil((a - s_min_) / h_ - 1e-12));
  const auto k1 = static_cast<std::size_t>(std::floor((b - s_min_) / h_ + 1e-12));
  if (k0 > k1 || k1 >= values_.size()) return std::sqrt(0.5 * (b - a) * (sq(a) + sq(b)));
  double acc = 0.5 * (s(k0) - a) * (sq(a) + values_[k0] * values_[k0]);
  for (std::size_t k = k0; k < k1; ++k) {
    acc += 0.5 * h_ * (values_[k] * values_[k] + values_[k + 1] * values_[k + 1]);
  }
  acc += 0.5 * (b - s(k1)) * (values_[k1] * values_[k1] + sq(b));
  return std::sqrt(std::max(acc, 0.0));
}

double RadiationProfile::l1_norm(double a, double b) const {
  a = std::max(a, s_min_);
  b = std::min(b, s_max_);
  if (!(b > a)) return 0.0;
  const auto k0 = static_cast<std::size_t>(std::ceil((a - s_min_) / h_ - 1e-12));
  const auto k1 = static_cast<std::size_t>(std::floor((b - s_min_) / h_ + 1e-12));
  if (k0 > k1 || k1 >= values_.size()) return 0.5 * (b - a) * (std::abs(at(a)) + std::abs(at(b)));
  double acc = 0.5 * (s(k0) - a) * (std::abs(at(a)) + std::abs(values_[k0]));
  for (std::size_t k = k0; k < k1; ++k) acc += 0.5 * h_ * (std::abs(values_[k]) + std::abs(values_[k + 1]));
  acc += 0.5 * (b - s(k1)) * (std::abs(values_[k1]) + std::abs(at(b)));
  return acc;
}

RadiationProfile RadiationProfile::resampled(double s_min, double s_max, std::size_t n) const {
  return sample(s_min, s_max, n, [this](double s) { return at(s); });
}

bool RadiationProfile::same_grid(const RadiationProfile& other) const {
  return n() == other.n() && std::abs(s_min_ - other.s_min_) <= 1e-9 * std::max(1.0, std::abs(s_min_)) &&
         std::abs(s_max_ - other.s_max_) <= 1e-9 * std::max(1.0, std::abs(s_max_));
}

RadiationProfile& RadiationProfile::operator+=(const RadiationProfile& other) {
  if (!same_grid(other)) throw ContractError("RadiationProfile: sum of profiles on different grids");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  rebuild();
  return *this;
}

RadiationProfile& RadiationProfile::operator-=(const RadiationProfile& other) {
  if (!same_grid(other)) throw ContractError("RadiationProfile: difference of profiles on different grids");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  rebuild();
  return *this;
}

RadiationProfile& RadiationProfile::operator*=(double c) {
  for (double& v : values_) v *= c;
  rebuild();
  return *this;
}

RadiationProfile operator+(RadiationProfile a, const RadiationProfile& b) { return a += b; }
RadiationProfile operator-(RadiationProfile a, const RadiationProfile& b) { return a -= b; }
RadiationProfile operator*(double c, RadiationProfile a) { return a *= c; }

RadiationProfile profile_from_data(const RadialState& state, ProfileDiagnostics* diag,
                                   double warn_threshold) {
  state.validate();
  const RadialGrid& grid = state.grid;
  if (!grid.touches_origin()) {
    throw ContractError("profile_from_data: the radial grid must start at r = 0 (whole-space data)");
  }
  const std::size_t n = grid.n();
  const auto w = state.w();
  const auto wr = radial_derivative(w, grid);
  std::vector<double> g(2 * n - 1);
  const std::size_t mid = n - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.r(i);
    g[mid + i] = 0.5 * (wr[i] + r * state.ut[i]);
    g[mid - i] = 0.5 * (wr[i] - r * state.ut[i]);
  }
  g[mid] = 0.5 * wr[0];
  RadiationProfile G(-grid.r_max(), grid.r_max(), std::move(g));
  if (diag != nullptr) {
    const RadialState back = data_from_profile(G, grid);
    const double scale = exterior_energy(state, 0.0).value;
    const double resid = exterior_energy(back - state, 0.0).value;
    diag->roundtrip_residual = scale > 0.0 ? resid / scale : resid;
    diag->coarse_warning = diag->roundtrip_residual > warn_threshold;
  }
  return G;
}

RadialState data_from_profile(const RadiationProfile& G, const RadialGrid& grid) {
  return linear_evolve(G, 0.0, grid);
}

RadialState linear_evolve(const RadiationProfile& G, double t, const RadialGrid& grid,
                          PropagatorDiagnostics* diag) {
  RadialState out = RadialState::zero(grid, t);
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const double r = grid.r(i);
    if (r == 0.0) {
      const double h = grid.h();
      out.u[i] = 2.0 * G.at(t);
      out.ut[i] = (G.at(t + h) - G.at(t - h)) / h;
      continue;
    }
    out.u[i] = (G.antiderivative(t + r) - G.antiderivative(t - r)) / r;
    out.ut[i] = (G.at(t + r) - G.at(t - r)) / r;
  }
  if (diag != nullptr) {
    diag->uncovered_extent = std::max(0.0, G.s_min() - (t - grid.r_max())) +
                             std::max(0.0, (t + grid.r_max()) - G.s_max());
  }
  return out;
}

Trajectory linear_trajectory(const RadiationProfile& G, const RadialGrid& grid,
                             std::span<const double> times) {
  Trajectory traj;
  traj.scheme = "closed-form";
  traj.source_descriptor = "zero";
  traj.dt = times.size() > 1 ? times[1] - times[0] : 0.0;
  traj.states.reserve(times.size());
  for (double t : times) traj.states.push_back(linear_evolve(G, t, grid));
  return traj;
}

RadiationProfile plus_profile(const RadiationProfile& G) {
  std::vector<double> v(G.values().rbegin(), G.values().rend());
  for (double& x : v) x = -x;
  return RadiationProfile(-G.s_max(), -G.s_min(), std::move(v));
}

double profile_energy(const RadiationProfile& G) {
  const double l2 = G.l2_norm();
  return 8.0 * std::numbers::pi * l2 * l2;
}

RadiationProfile random_smooth_profile(std::uint64_t seed, double s_min, double s_max,
                                       std::size_t n, double a, double b, int modes) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> coef(0.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(2 * modes));
  for (double& x : c) x = coef(rng);
  const double width = b - a;
  auto g = [&](double s) {
    if (s <= a || s >= b) return 0.0;
    const double x = (s - a) / width;  // in (0, 1)
    const double window = std::exp(1.0 - 1.0 / (1.0 - (2.0 * x - 1.0) * (2.0 * x - 1.0)));
    double acc = 0.0;
    for (int m = 0; m < modes; ++m) {
      const double k = std::numbers::pi * (m + 1);
      acc += c[2 * m] * std::cos(k * x) + c[2 * m + 1] * std::sin(k * x);
    }
    return window * acc;
  };
  RadiationProfile G = RadiationProfile::sample(s_min, s_max, n, g);
  const double norm = G.l2_norm();
  if (norm > 0.0) G *= 1.0 / norm;
  return G;
}

}  // namespace ewl
