#include "ewl/spacetime_norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ewl/error.hpp"

namespace ewl {

RegionSpec RegionSpec::exterior(double R) {
  if (!(R >= 0.0)) throw ContractError("RegionSpec: R must be nonnegative");
  return {Kind::Exterior, R, std::numeric_limits<double>::infinity()};
}

RegionSpec RegionSpec::annulus(double r, double R) {
  if (!(r >= 0.0) || !(r < R)) throw ContractError("RegionSpec: annulus needs 0 <= r < R");
  return {Kind::Annulus, r, R};
}

RegionSpec RegionSpec::channel(double R) {
  if (!(R > 0.0)) throw ContractError("RegionSpec: channel radius must be positive");
  return {Kind::Channel, R, 2.0 * R};
}

bool RegionSpec::contains(double r, double t) const {
  const double a = std::abs(t);
  return r > a + inner && r < a + outer;
}

std::string RegionSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Exterior: os << "exterior(R=" << inner << ")"; break;
    case Kind::Annulus: os << "annulus(r=" << inner << ",R=" << outer << ")"; break;
    case Kind::Channel: os << "channel(R=" << inner << ")"; break;
  }
  return os.str();
}

namespace {

void check_region(const Trajectory& traj, const RegionSpec& region) {
  traj.validate();
  const RadialGrid& g = traj.grid();
  for (const auto& s : traj.states) {
    const double lo = std::abs(s.t) + region.inner;
    if (lo < g.r_min() - 1e-12) {
      std::ostringstream os;
      os << "region " << region.describe() << " reaches r = " << lo << " at t = " << s.t
         << ", below the grid start " << g.r_min() << " (uncovered extent " << g.r_min() - lo << ")";
      throw ContractError(os.str());
    }
  }
  if (traj.cone_origin && region.inner < *traj.cone_origin - 1e-12) {
    std::ostringstream os;
    os << "region " << region.describe() << " enters the non-authoritative part of an exterior run with R = "
       << *traj.cone_origin;
    throw ContractError(os.str());
  }
}

// Integral of f over the slice of the region at time t, plus the radial
// overshoot of the slice beyond the grid.
double slice_integral(const std::vector<double>& f, const RadialGrid& g, const RegionSpec& region, double t,
                      double& overshoot) {
  const double a = std::abs(t) + region.inner;
  double b = g.r_max();
  if (region.bounded()) {
    b = std::abs(t) + region.outer;
    overshoot = std::max(overshoot, b - g.r_max());
  }
  return integrate_interval(f, g, a, b);
}

// Trapezoid in t of the per-frame values.
double time_trapezoid(const std::vector<double>& v, const std::vector<double>& times) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t n = 1; n < v.size(); ++n) acc += 0.5 * (v[n] + v[n - 1]) * std::abs(times[n] - times[n - 1]);
  return acc;
}

// Weighted density 4 pi r^2 |u|^p on the grid (or every other node).
std::vector<double> power_density(const RadialState& s, double p) {
  const RadialGrid& g = s.grid;
  std::vector<double> f(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double r = g.r(i);
    f[i] = 4.0 * std::numbers::pi * r * r * std::pow(std::abs(s.u[i]), p);
  }
  return f;
}

template <class SliceFn>
NormResult space_time(const Trajectory& traj, const RegionSpec& region, SliceFn&& slice, double outer_power) {
  check_region(traj, region);
  const RadialGrid& g = traj.grid();
  const auto times = traj.times();
  NormResult out;
  std::vector<double> full, coarse, coarse_times;
  // half resolution: every other node and every other frame
  const bool can_halve = g.n() >= 5 && (g.n() - 1) % 2 == 0;
  const RadialGrid half = can_halve ? RadialGrid(g.r_min(), g.r_max(), (g.n() - 1) / 2 + 1) : g;
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const auto f = slice(traj.states[n]);
    full.push_back(slice_integral(f, g, region, times[n], out.clipped_extent));
    if (n % 2 == 0) {
      std::vector<double> fh;
      if (can_halve) {
        fh.reserve(half.n());
        for (std::size_t i = 0; i < g.n(); i += 2) fh.push_back(f[i]);
      } else {
        fh = f;
      }
      double dummy = 0.0;
      coarse.push_back(slice_integral(fh, half, region, times[n], dummy));
      coarse_times.push_back(times[n]);
    }
  }
  auto reduce = [&](std::vector<double> v, const std::vector<double>& ts) {
    for (auto& x : v) x = std::pow(std::max(x, 0.0), outer_power);
    const double acc = ts.size() < 2 ? 0.0 : time_trapezoid(v, ts);
    return acc;
  };
  out.value = reduce(full, times);
  const double coarse_value = coarse_times.size() >= 2 ? reduce(coarse, coarse_times) : out.value;
  out.error = std::abs(out.value - coarse_value);
  return out;
}

}  // namespace

NormResult y_norm(const Trajectory& traj, const RegionSpec& region) {
  // slice: int |u|^10 dx; frame weight (.)^{1/2} = ||u||_{L^10}^5
  NormResult r = space_time(traj, region, [](const RadialState& s) { return power_density(s, 10.0); }, 0.5);
  const double v = std::pow(r.value, 0.2);
  const double e = std::abs(std::pow(r.value + r.error, 0.2) - v);
  r.value = v;
  r.error = e;
  return r;
}

double ChannelNorms::tail_sum_fourth(int N) const {
  double acc = 0.0;
  for (int k = std::max(N, k_min); k <= k_max(); ++k) acc += std::pow(at(k), 4.0);
  return acc;
}

ChannelNorms dyadic_channel_norms(const Trajectory& traj, int k_min, int k_max) {
  if (k_max < k_min) throw ContractError("dyadic_channel_norms: empty k range");
  ChannelNorms out;
  out.k_min = k_min;
  for (int k = k_min; k <= k_max; ++k) {
    const NormResult r = y_norm(traj, RegionSpec::channel(std::ldexp(1.0, k)));
    out.b.push_back(r.value);
    out.clipped.push_back(r.clipped_extent);
    out.sum_squares += r.value * r.value;
  }
  return out;
}

NormResult source_l1l2_norm(const Trajectory& traj, const SourceField& F, const RegionSpec& region) {
  return space_time(
      traj, region,
      [&F](const RadialState& s) {
        const RadialGrid& g = s.grid;
        std::vector<double> f(g.n());
        for (std::size_t i = 0; i < g.n(); ++i) {
          const double r = g.r(i);
          const double v = F(r, s.t, s.u[i]);
          f[i] = 4.0 * std::numbers::pi * r * r * v * v;
        }
        return f;
      },
      0.5);
}

NormResult source_l1l2_norm(const Trajectory& traj, const Nonlinearity& F, const RegionSpec& region) {
  return source_l1l2_norm(traj, SourceField([&F](double r, double t, double u) { return F(r, t, u); }), region);
}

}  // namespace ewl
