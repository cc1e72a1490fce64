#include "ewl/scatter_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ewl/error.hpp"
#include "ewl/nonlinear_evolve.hpp"
#include "ewl/nonlinearity.hpp"
#include "ewl/spacetime_norms.hpp"

namespace ewl {

namespace {

std::size_t frame_near(const Trajectory& traj, double t) {
  std::size_t best = 0;
  double dist = 1e300;
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const double d = std::abs(traj.states[n].t - t);
    if (d < dist) {
      dist = d;
      best = n;
    }
  }
  if (dist > 0.5 * std::abs(traj.dt) + 1e-12) {
    std::ostringstream os;
    os << "no frame within dt/2 of t = " << t;
    throw ContractError(os.str());
  }
  return best;
}

double l2_of(const RadiationProfile& G, double a) {
  return a >= G.s_max() ? 0.0 : G.l2_norm(std::max(a, G.s_min()), G.s_max());
}

}  // namespace

ProfileEstimate extract_profile(const Trajectory& traj, Direction direction, std::optional<double> R_restrict,
                                std::vector<double> probe_times, double tol) {
  traj.validate();
  const RadialGrid& g = traj.grid();
  if (!g.touches_origin()) throw ContractError("extract_profile: the grid must start at r = 0");
  const double T = traj.back().t;
  if (direction == Direction::Positive && !(T > 0.0)) {
    throw ContractError("extract_profile: the positive direction needs a forward run");
  }
  if (direction == Direction::Negative && !(T < 0.0)) {
    throw ContractError("extract_profile: the negative direction needs a backward run");
  }
  if (probe_times.empty()) probe_times = {T / 4.0, T / 2.0, T};
  const double R = R_restrict.value_or(0.0);
  if (traj.cone_origin && R < *traj.cone_origin) {
    throw ContractError("extract_profile: R_restrict must be at least the cone radius of an exterior run");
  }

  ProfileEstimate est{RadiationProfile::zero(-g.r_max(), g.r_max(), 2 * g.n() - 1), direction, R_restrict, {}, {}, {},
                      false};
  std::optional<RadiationProfile> previous;
  for (double tp : probe_times) {
    const RadialState& s = traj.states[frame_near(traj, tp)];
    const double t = s.t;
    const RadiationProfile H = profile_from_data(s);
    RadiationProfile G = RadiationProfile::zero(-g.r_max(), g.r_max(), 2 * g.n() - 1);
    auto& vals = G.mutable_values();
    for (std::size_t k = 0; k < G.n(); ++k) {
      const double sk = G.s(k);
      if (R_restrict && sk <= R) continue;
      vals[k] = direction == Direction::Positive ? -H.at(-sk - t) : H.at(sk - t);
    }
    G = RadiationProfile(G.s_min(), G.s_max(), vals);

    // probes along s = r - |t| in the authoritative exterior
    const auto ur = radial_derivative(s.u, g);
    const double sign = direction == Direction::Positive ? 1.0 : -1.0;
    std::vector<double> d2(g.n(), 0.0);
    for (std::size_t i = 0; i < g.n(); ++i) {
      const double r = g.r(i);
      const double p1 = r * s.ut[i];
      const double p2 = -sign * r * ur[i];
      d2[i] = (p1 - p2) * (p1 - p2);
    }
    const double a = std::abs(t) + R;
    est.discrepancy.push_back(a < g.r_max() ? std::sqrt(integrate_interval(d2, g, a, g.r_max())) : 0.0);

    if (previous) {
      const double norm = l2_of(G, R_restrict ? R : G.s_min());
      const RadiationProfile diff = G - *previous;
      const double dn = l2_of(diff, R_restrict ? R : diff.s_min());
      est.change.push_back(norm > 0.0 ? dn / norm : dn);
    }
    previous = G;
    est.probe_times.push_back(t);
  }
  est.G = *previous;
  est.converged = !est.change.empty() && est.change.back() < tol;
  return est;
}

RadiationProfile negative_profile(const ProfileEstimate& est) {
  return est.direction == Direction::Positive ? plus_profile(est.G) : est.G;
}

Trajectory free_wave_like(const ProfileEstimate& est, const Trajectory& like) {
  const auto times = like.times();
  Trajectory tr = linear_trajectory(negative_profile(est), like.grid(), times);
  tr.cone_origin = like.cone_origin;
  tr.source_descriptor = "free wave of the extracted profile";
  return tr;
}

bool ResidualCurve::decreasing(double floor) const {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] <= floor && values[i - 1] <= floor) continue;
    if (!(values[i] < values[i - 1])) return false;
  }
  return values.size() >= 2 && (values.front() > floor ? values.back() < values.front() : true);
}

bool ResidualCurve::equivalent(double tol, double floor) const {
  return !values.empty() && decreasing(floor) && values.back() < tol;
}

ResidualCurve equiv_residual(const Trajectory& u, const Trajectory& v, double R, const std::vector<double>& at) {
  u.validate();
  v.validate();
  if (!(u.grid() == v.grid())) throw ContractError("equiv_residual: trajectories live on different grids");
  if (u.states.size() != v.states.size()) throw ContractError("equiv_residual: frame counts differ");
  for (std::size_t n = 0; n < u.states.size(); ++n) {
    if (std::abs(u.states[n].t - v.states[n].t) > 1e-9 * (1.0 + std::abs(u.states[n].t))) {
      throw ContractError("equiv_residual: frame times differ");
    }
  }
  std::vector<std::size_t> frames;
  if (at.empty()) {
    for (std::size_t n = 0; n < u.states.size(); ++n) frames.push_back(n);
  } else {
    for (double t : at) frames.push_back(frame_near(u, t));
  }
  ResidualCurve c;
  const RadialGrid& g = u.grid();
  for (std::size_t n : frames) {
    const double t = u.states[n].t;
    const double edge = std::abs(t) + R;
    c.times.push_back(t);
    if (edge >= g.r_max()) {
      c.values.push_back(0.0);
      continue;
    }
    const double e = exterior_energy(u.states[n] - v.states[n], edge).value;
    c.values.push_back(e * e);
  }
  return c;
}

CharacteristicNumber characteristic_number(const RadialState& u, const RadialState& v,
                                           std::optional<std::pair<double, double>> window, double noise_threshold) {
  u.validate();
  v.validate();
  if (!(u.grid == v.grid)) throw ContractError("characteristic_number: states live on different grids");
  if (std::abs(u.t - v.t) > 1e-9 * (1.0 + std::abs(u.t))) {
    throw ContractError("characteristic_number: states at different times");
  }
  const RadialGrid& g = u.grid;
  const auto [r1, r2] = window.value_or(std::pair{0.5 * g.r_max(), 0.9 * g.r_max()});
  if (!(r1 < r2) || r1 < g.r_min() || r2 > g.r_max()) throw ContractError("characteristic_number: bad fit window");

  CharacteristicNumber out;
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  for (std::size_t i = g.lower_index(r1); i < g.n() && g.r(i) <= r2; ++i) {
    const double y = g.r(i) * (u.u[i] - v.u[i]);
    sum += y;
    sum2 += y * y;
    ++count;
  }
  if (count < 2) throw ContractError("characteristic_number: the fit window holds fewer than two nodes");
  out.alpha_fit = sum / static_cast<double>(count);
  const double var = std::max(0.0, sum2 / static_cast<double>(count) - out.alpha_fit * out.alpha_fit);
  const double scale = std::max(std::abs(out.alpha_fit), 1e-300);
  out.fit_residual = std::sqrt(var) / scale;

  const RadiationProfile D = profile_from_data(u - v);
  out.alpha_int = D.integral();
  // geometric extrapolation of the L^1 mass over the last two dyadic shells
  const double S = D.s_max();
  const double last = D.l1_norm(S / 2.0, S) + D.l1_norm(-S, -S / 2.0);
  const double prev = D.l1_norm(S / 4.0, S / 2.0) + D.l1_norm(-S / 2.0, -S / 4.0);
  if (last == 0.0) {
    out.tail_bound = 0.0;
  } else if (prev > 0.0 && last < prev) {
    const double q = last / prev;
    out.tail_bound = last * q / (1.0 - q);
  } else {
    out.tail_bound = std::numeric_limits<double>::infinity();
  }

  const double denom = std::max(std::abs(out.alpha_fit), std::abs(out.alpha_int));
  out.agreement = denom > 0.0 ? std::abs(out.alpha_fit - out.alpha_int) / denom : 0.0;
  const bool zero = out.alpha_fit == 0.0 && out.alpha_int == 0.0;
  out.reliable = zero || (out.fit_residual < noise_threshold && std::isfinite(out.tail_bound) &&
                          out.tail_bound <= noise_threshold * std::max(std::abs(out.alpha_int), 1e-300));
  return out;
}

std::string to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::Scatters: return "scatters";
    case VerdictKind::Undecided: return "undecided";
    case VerdictKind::Blowup: return "blowup";
  }
  return "unknown";
}

Trajectory free_wave_through_final(const Trajectory& traj) {
  traj.validate();
  const RadialGrid& g = traj.grid();
  const RadialState& last = traj.back();
  const double span = last.t - traj.states.front().t;
  if (traj.states.size() < 2 || span == 0.0) return traj;
  const double frame_dt = std::abs(traj.dt);
  const auto m = static_cast<std::size_t>(std::ceil(frame_dt / g.h() - 1e-9));
  EvolveOptions o;
  o.store_every = m;
  Trajectory back = evolve(last, Nonlinearity::zero(), -span, frame_dt / static_cast<double>(m), o);
  std::reverse(back.states.begin(), back.states.end());
  back.dt = traj.dt;
  back.cone_origin = traj.cone_origin;
  back.source_descriptor = "free wave through the final state";
  return back;
}

Trajectory time_window(const Trajectory& traj, double a, double b) {
  Trajectory out = traj;
  out.states.clear();
  for (const auto& s : traj.states) {
    const double at = std::abs(s.t);
    if (at >= a - 1e-12 && at <= b + 1e-12) out.states.push_back(s);
  }
  return out;
}

ScatterVerdict scattering_verdict(const Trajectory& traj, double R, const ScatterOptions& opts) {
  traj.validate();
  ScatterVerdict v;
  if (traj.blowup && traj.blowup->authoritative) {
    v.kind = VerdictKind::Blowup;
    std::ostringstream os;
    os << "cap exceeded at t = " << traj.blowup->t << ", r = " << traj.blowup->r;
    v.reason = os.str();
    return v;
  }
  const double T = std::abs(traj.back().t);
  if (traj.states.size() < 5 || T == 0.0) {
    v.reason = "trajectory too short";
    return v;
  }
  const RegionSpec region = RegionSpec::exterior(R);
  double total = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double b = T / std::ldexp(1.0, k), a = b / 2.0;
    const Trajectory w = time_window(traj, a, b);
    const double y5 = w.states.size() >= 2 ? std::pow(y_norm(w, region).value, 5.0) : 0.0;
    v.window_y5.push_back(y5);
    total += y5;
  }
  {
    const Trajectory head = time_window(traj, 0.0, T / 256.0);
    if (head.states.size() >= 2) total += std::pow(y_norm(head, region).value, 5.0);
  }
  v.last_window_fraction = total > 0.0 ? v.window_y5.front() / total : 0.0;

  const Trajectory free = free_wave_through_final(traj);
  std::vector<double> at;
  const double sign = traj.back().t > 0 ? 1.0 : -1.0;
  for (int k = opts.checkpoints; k >= 1; --k) at.push_back(sign * T / std::ldexp(1.0, k));
  v.residual = equiv_residual(traj, free, R, at);
  const double e0 = exterior_energy(traj.states.front(), R).value;
  v.initial_energy_sq = e0 * e0;

  const bool y_ok = v.last_window_fraction < opts.y_fraction_tol;
  const double e0sq = std::max(v.initial_energy_sq, 1e-300);
  const bool res_ok = v.residual.equivalent(opts.residual_tol * e0sq, opts.residual_floor * e0sq);
  if (y_ok && res_ok) {
    v.kind = VerdictKind::Scatters;
    v.reason = "Y-norm tail summable and residual against the extracted wave decays";
  } else {
    v.kind = VerdictKind::Undecided;
    std::ostringstream os;
    if (!y_ok) os << "last dyadic window carries " << v.last_window_fraction << " of Y^5; ";
    if (!res_ok) os << "residual against the extracted wave does not decay below tolerance";
    v.reason = os.str();
  }
  return v;
}

}  // namespace ewl
