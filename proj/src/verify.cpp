#include "ewl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ewl/nonlinear_evolve.hpp"
#include "ewl/nonlinearity.hpp"
#include "ewl/spacetime_norms.hpp"

namespace ewl {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

CheckRow row(const std::string& suite, const std::string& name, double value, double threshold, bool pass,
             std::string detail = {}) {
  return {suite, name, value, threshold, pass, std::move(detail)};
}

double bump(double r, double c, double w) {
  const double x = (r - c) / w;
  return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
}

}  // namespace

std::vector<CheckRow> verify_isometry(std::uint64_t seed, int count, std::size_t n) {
  std::vector<CheckRow> rows;
  const RadialGrid g(0.0, 20.0, n);
  for (int i = 0; i < count; ++i) {
    const auto G = random_smooth_profile(seed + static_cast<std::uint64_t>(i), -g.r_max(), g.r_max(), 2 * n - 1,
                                         -6.0, 6.0);
    const RadialState d = data_from_profile(G, g);
    const double e = exterior_energy(d, 0.0).value;
    const double c = g.r_max() * d.u.back();
    const double data_sq = e * e + 4.0 * std::numbers::pi * c * c / g.r_max();
    const double pe = profile_energy(G);
    const double rel = std::abs(pe - data_sq) / pe;
    rows.push_back(row("isometry", "profile " + std::to_string(seed + static_cast<std::uint64_t>(i)), rel, 0.01,
                       rel <= 0.01));
  }
  return rows;
}

std::vector<CheckRow> verify_conservation(std::uint64_t seed) {
  std::vector<CheckRow> rows;
  const double amp = 1.0 + 0.1 * static_cast<double>(seed % 5);
  {
    const auto g = RadialGrid::with_spacing(0.0, 25.0, 0.01);
    const auto s = RadialState::sample(g, [amp](double r) { return amp * bump(r, 0.0, 2.0); },
                                       [amp](double r) { return 0.5 * amp * bump(r, 1.0, 1.0); });
    const auto F = Nonlinearity::defocusing_quintic();
    EvolveOptions o;
    o.store_every = 100;
    const auto tr = evolve(s, F, 10.0, g.h(), o);
    const double E0 = conserved_energy(s, F);
    double worst = 0.0;
    for (const auto& st : tr.states) worst = std::max(worst, std::abs(conserved_energy(st, F) - E0) / E0);
    rows.push_back(row("conservation", "defocusing energy drift, T=10", worst, 5e-3, worst < 5e-3));
  }
  {
    const auto g = RadialGrid::with_spacing(0.0, 20.0, 0.02);
    const auto G = random_smooth_profile(seed, -g.r_max(), g.r_max(), 2 * g.n() - 1, -3.0, 3.0);
    const auto tr = evolve(data_from_profile(G, g), Nonlinearity::zero(), 5.0, g.h());
    const auto exact = linear_evolve(G, tr.back().t, g);
    const double err = exterior_energy(tr.back() - exact, 0.0).value / exterior_energy(exact, 0.0).value;
    rows.push_back(row("conservation", "F=0 against closed form, relative energy error", err, 1e-3, err < 1e-3));
  }
  {
    const auto g = RadialGrid::with_spacing(0.0, 20.0, 0.01);
    const auto s = RadialState::sample(g, [amp](double r) { return amp * bump(r, 0.0, 2.0); },
                                       [](double) { return 0.0; });
    const auto F = Nonlinearity::defocusing_quintic();
    const auto fwd = evolve(s, F, 3.0, g.h());
    const auto back = evolve(fwd.back(), F, -3.0, g.h());
    const double err = exterior_energy(back.back() - s, 0.0).value / exterior_energy(s, 0.0).value;
    rows.push_back(row("conservation", "time reversal, relative energy error", err, 1e-3, err < 1e-3));
  }
  return rows;
}

std::vector<double> channel_sweep(const RadiationProfile& G, const std::vector<double>& R1, double T, double h,
                                  double frame_dt) {
  const double widest = *std::max_element(R1.begin(), R1.end());
  const RadialGrid g = RadialGrid::with_spacing(0.0, T + 2.0 * widest + 4.0 * h, h);
  const RadiationProfile Gg = G.resampled(-g.r_max(), g.r_max(), 2 * g.n() - 1);
  std::vector<double> out(R1.size(), 0.0);
  for (double sign : {1.0, -1.0}) {
    std::vector<double> times;
    const auto frames = static_cast<std::size_t>(std::ceil(T / frame_dt - 1e-9));
    for (std::size_t n = 0; n <= frames; ++n) times.push_back(sign * T * static_cast<double>(n) / frames);
    const Trajectory tr = linear_trajectory(Gg, g, times);
    for (std::size_t i = 0; i < R1.size(); ++i) out[i] += std::pow(y_norm(tr, RegionSpec::channel(R1[i])).value, 5.0);
  }
  for (double& b : out) b = std::pow(b, 0.2);
  return out;
}

DecaySuite channel_decay_suite(std::uint64_t seed, int count) {
  DecaySuite s;
  const double R = 1.0;
  const int half = std::max(1, count / 2);
  std::vector<double> R1;
  for (int m = 0; m <= 4; ++m) {
    R1.push_back(R / std::ldexp(1.0, m));
    s.R1_over_R.push_back(R1.back() / R);
  }
  for (int i = 0; i < count; ++i) {
    const auto G = random_smooth_profile(seed + static_cast<std::uint64_t>(i), -50.0, 50.0, 16001, R, 2.0 * R);
    const auto b = channel_sweep(G, R1, 40.0, 1.0 / 160.0, 0.05);
    std::vector<double> q;
    for (std::size_t m = 0; m < b.size(); ++m) q.push_back(b[m] / (std::pow(s.R1_over_R[m], 0.1) * G.l2_norm()));
    // Aitken extrapolation of the ratio sequence towards R1 -> 0
    const std::size_t M = q.size() - 1;
    const double d1 = q[M] - q[M - 1], d0 = q[M - 1] - q[M - 2];
    const double rho = d0 != 0.0 ? d1 / d0 : 0.0;
    double limit = q[M];
    if (d1 > 0.0) limit = rho < 1.0 ? q[M] + d1 * rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
    double top = limit;
    for (double x : q) top = std::max(top, x);
    (i < half ? s.C_fit : s.C_check) = std::max(i < half ? s.C_fit : s.C_check, top);
    s.rho.push_back(rho);
    s.limits.push_back(limit);
    s.ratios.push_back(std::move(q));
  }
  std::vector<double> ks;
  for (int k = -3; k <= 4; ++k) ks.push_back(std::ldexp(1.0, k));
  for (int i = 0; i < count; ++i) {
    const auto G = random_smooth_profile(seed + 100 + static_cast<std::uint64_t>(i), -100.0, 100.0, 16001, -4.0, 4.0);
    const auto b = channel_sweep(G, ks, 40.0, 1.0 / 80.0, 0.1);
    double sum = 0.0;
    for (double x : b) sum += x * x;
    const double r = sum / profile_energy(G);
    s.l2_ratios.push_back(r);
    (i < half ? s.l2_fit : s.l2_check) = std::max(i < half ? s.l2_fit : s.l2_check, r);
  }
  return s;
}

std::vector<CheckRow> verify_decay(std::uint64_t seed, int count) {
  const DecaySuite s = channel_decay_suite(seed, count);
  std::vector<CheckRow> rows;
  for (std::size_t i = 0; i < s.ratios.size(); ++i) {
    rows.push_back(row("decay", "channel ratios converge as R1 -> 0, profile " + std::to_string(seed + i), s.rho[i],
                       1.0, s.rho[i] < 1.0, "extrapolated ratio " + fmt(s.limits[i])));
  }
  rows.push_back(row("decay", "channel constant, held-out half / fitted half", s.C_check / s.C_fit, 1.5,
                     s.C_check <= 1.5 * s.C_fit && s.C_check >= 0.5 * s.C_fit, "C = " + fmt(s.C_fit)));
  rows.push_back(row("decay", "l2 channel-sum constant, held-out half / fitted half", s.l2_check / s.l2_fit, 1.5,
                     s.l2_check <= 1.5 * s.l2_fit && s.l2_check >= 0.5 * s.l2_fit, "C = " + fmt(s.l2_fit)));
  return rows;
}

}  // namespace ewl
