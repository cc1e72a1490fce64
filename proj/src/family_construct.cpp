#include "ewl/family_construct.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ewl/error.hpp"
#include "ewl/nonlinear_evolve.hpp"
#include "ewl/scatter_analysis.hpp"
#include "ewl/spacetime_norms.hpp"

namespace ewl {

namespace {

struct Runs {
  Trajectory fwd;
  Trajectory bwd;
};

void require_no_blowup(const Trajectory& tr, const char* what) {
  if (tr.blowup && tr.blowup->authoritative) {
    std::ostringstream os;
    os << what << ": blow-up at t = " << tr.blowup->t << ", r = " << tr.blowup->r;
    throw NumericalError(os.str());
  }
}

Runs run_both(const RadialState& data, const Nonlinearity& F, double R, double T, const char* what) {
  const double dt = data.grid.h();
  const auto every = static_cast<std::size_t>(std::max(1.0, std::round(T / dt / 8.0)));
  EvolveOptions o;
  o.store_every = every;
  Runs r{evolve_exterior(data, F, R, T, dt, o, InteriorFill::AsGiven),
         evolve_exterior(data, F, R, -T, dt, o, InteriorFill::AsGiven)};
  require_no_blowup(r.fwd, what);
  require_no_blowup(r.bwd, what);
  return r;
}

struct Extracted {
  RadiationProfile plus;
  RadiationProfile minus;
  double discrepancy = 0.0;
};

Extracted extract_both(const Runs& r, double R) {
  const double T = r.fwd.back().t;
  const auto p = extract_profile(r.fwd, Direction::Positive, R, {T});
  const auto m = extract_profile(r.bwd, Direction::Negative, R, {-T});
  return {p.G, m.G, std::max(p.discrepancy.back(), m.discrepancy.back())};
}

// (T G)(s) - G(s) contributions in difference form: -NL^-(s) for s > R and
// NL^+(-s) for s < -R, zero in between.
RadiationProfile mapped(const RadiationProfile& nl_plus, const RadiationProfile& nl_minus, double R) {
  std::vector<double> out(nl_minus.n(), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double s = nl_minus.s(k);
    if (s > R) out[k] = -nl_minus[k];
    else if (s < -R) out[k] = nl_plus.at(-s);
  }
  return RadiationProfile(nl_minus.s_min(), nl_minus.s_max(), std::move(out));
}

RadiationProfile blend(const RadiationProfile& G, const RadiationProfile& TG, double theta) {
  std::vector<double> v(G.n());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = (1.0 - theta) * G[k] + theta * TG[k];
  return RadiationProfile(G.s_min(), G.s_max(), std::move(v));
}

// Roundoff level of profile changes relative to the size of the data profile.
constexpr double kRoundoff = 1e-12;

// Records the step and decides whether to stop: relative change below tol, or
// absolute change at the roundoff floor. Throws on expansion.
bool record(std::vector<IterationRecord>& history, double change, double discrepancy, double norm, double tol,
            double floor, double& worst_ratio, const char* what) {
  IterationRecord rec;
  rec.iteration = static_cast<int>(history.size()) + 1;
  rec.profile_change_l2 = change;
  rec.probe_discrepancy = discrepancy;
  if (!history.empty() && history.back().profile_change_l2 > 0.0) {
    rec.ratio = change / history.back().profile_change_l2;
    // ratios of changes near the roundoff floor say nothing about contraction
    if (change > 100.0 * floor) worst_ratio = std::max(worst_ratio, rec.ratio);
  }
  history.push_back(rec);
  if (change <= tol * norm || change <= floor) return true;
  const std::size_t n = history.size();
  if (n >= 3 && history[n - 1].ratio >= 1.0 && history[n - 2].ratio >= 1.0) {
    std::ostringstream os;
    os << what << ": iteration expands, last ratio " << rec.ratio << " after " << n << " iterations";
    throw NumericalError(os.str());
  }
  return false;
}

void check_theta(double theta, int max_iter) {
  if (!(theta > 0.0) || theta > 1.0) throw ContractError("damping theta must lie in (0, 1]");
  if (max_iter < 1) throw ContractError("max_iter must be positive");
}

}  // namespace

PrimaryResult construct_primary(const RadiationProfile& vL, const Nonlinearity& F, double R,
                                const ConstructOptions& opts) {
  check_theta(opts.theta, opts.max_iter);
  if (!(R >= 0.0)) throw ContractError("construct_primary: R must be nonnegative");
  if (!(opts.h > 0.0) || !(opts.probe_time > 0.0)) {
    throw ContractError("construct_primary: h and probe_time must be positive");
  }
  const double T = opts.probe_time;
  const double extent = std::max({std::abs(vL.s_min()), std::abs(vL.s_max()), R});
  const double r_max = opts.r_max > 0.0 ? opts.r_max : extent + T + 10.0;
  if (r_max <= T + R) throw ContractError("construct_primary: r_max must exceed probe_time + R");
  const RadialGrid grid = RadialGrid::with_spacing(0.0, r_max, opts.h);
  const double S = grid.r_max();
  const std::size_t np = 2 * grid.n() - 1;

  PrimaryResult res{RadialState::zero(grid), RadiationProfile::zero(-S, S, np),
                    RadiationProfile::sample(-S, S, np, [&vL](double s) { return vL.at(s); }),
                    R, T, 0.0, 0.0, 0.0, 0.0, {}};

  {
    const double frame = grid.h() * std::max(1.0, std::round(0.25 / grid.h()));
    std::vector<double> tf, tb;
    for (double t = 0.0; t <= T + 1e-9; t += frame) {
      tf.push_back(t);
      tb.push_back(-t);
    }
    const RegionSpec region = RegionSpec::exterior(R);
    const double yf = y_norm(linear_trajectory(res.G0, grid, tf), region).value;
    const double yb = y_norm(linear_trajectory(res.G0, grid, tb), region).value;
    res.y_norm_vL = std::pow(std::pow(yf, 5.0) + std::pow(yb, 5.0), 0.2);
  }
  if (!(res.y_norm_vL < opts.delta)) {
    std::ostringstream os;
    os << "construct_primary: ||chi_R v_L||_Y = " << res.y_norm_vL << " is not below the smallness threshold "
       << opts.delta;
    throw ContractError(os.str());
  }

  RadiationProfile G = res.G;
  if (opts.initial_guess) {
    const RadiationProfile& g0 = *opts.initial_guess;
    G = RadiationProfile::sample(-S, S, np, [&](double s) { return std::abs(s) <= R ? 0.0 : g0.at(s); });
  }
  bool done = false;
  for (int it = 0; it < opts.max_iter && !done; ++it) {
    const RadialState data = data_from_profile(res.G0 + G, grid);
    const Extracted nl = extract_both(run_both(data, F, R, T, "construct_primary"), R);
    const Extracted lin = extract_both(run_both(data, Nonlinearity::zero(), R, T, "construct_primary"), R);
    const RadiationProfile TG = mapped(nl.plus - lin.plus, nl.minus - lin.minus, R);
    const RadiationProfile next = blend(G, TG, opts.theta);
    const double change = (next - G).l2_norm();
    res.fixed_point_residual = (TG - G).l2_norm();
    G = next;
    done = record(res.history, change, nl.discrepancy, G.l2_norm(), opts.tol,
                  kRoundoff * (res.G0.l2_norm() + G.l2_norm()), res.contraction_ratio, "construct_primary");
  }
  if (!done) {
    std::ostringstream os;
    os << "construct_primary: no convergence in " << opts.max_iter << " iterations, last ratio "
       << res.history.back().ratio;
    throw NumericalError(os.str());
  }
  res.G = G;
  res.state = data_from_profile(res.G0 + G, grid);
  res.difference_norm = std::sqrt(profile_energy(G));
  return res;
}

std::optional<int> select_n(const std::vector<double>& b, int k_min, double gamma, double alpha,
                            const AlphaOptions& opts) {
  const double need = opts.n_factor * (1.0 + std::sqrt(gamma)) * (1.0 + alpha * alpha);
  const int k_max = k_min + static_cast<int>(b.size()) - 1;
  for (int N = k_min; N <= k_max; ++N) {
    double tail = 0.0;
    for (int j = N; j <= k_max; ++j) tail += std::pow(b[static_cast<std::size_t>(j - k_min)], 4.0);
    if (opts.c * tail < opts.tail_threshold && std::ldexp(1.0, N) >= need) return N;
  }
  return std::nullopt;
}

AlphaResult construct_alpha(const BaseSolution& base, const Nonlinearity& F, double alpha, const AlphaOptions& opts) {
  check_theta(opts.theta, opts.max_iter);
  if (!std::isfinite(alpha)) throw ContractError("construct_alpha: alpha must be finite");
  base.data.validate();
  const RadialGrid& grid = base.data.grid;
  if (!grid.touches_origin()) throw ContractError("construct_alpha: the base grid must start at r = 0");
  if (std::abs(base.data.t) > 0.0) throw ContractError("construct_alpha: base data must be given at t = 0");

  // channel norms of the base, both time directions, over a provisional horizon
  const int k_min = base.R > 1.0 ? static_cast<int>(std::ceil(std::log2(base.R) - 1e-12)) : 0;
  const int k_top = static_cast<int>(std::floor(std::log2(grid.r_max() / 2.0)));
  if (k_top < k_min) throw ContractError("construct_alpha: grid too short for any dyadic channel");
  std::vector<double> b(static_cast<std::size_t>(k_top - k_min + 1), 0.0);
  {
    const double horizon = grid.r_max() / 2.0;
    const Runs vr = run_both(base.data, F, base.R, horizon, "construct_alpha (base)");
    const auto cf = dyadic_channel_norms(vr.fwd, k_min, k_top);
    const auto cb = dyadic_channel_norms(vr.bwd, k_min, k_top);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::pow(std::pow(cf.b[i], 5.0) + std::pow(cb.b[i], 5.0), 0.2);
  }
  const auto N = select_n(b, k_min, F.gamma(), alpha, opts);
  if (!N) {
    double tail = 0.0;
    for (double x : b) tail += std::pow(x, 4.0);
    std::ostringstream os;
    os << "construct_alpha: no admissible N on this grid: need c * sum_{j>=N} b_j^4 < " << opts.tail_threshold
       << " and 2^N >= " << opts.n_factor * (1.0 + std::sqrt(F.gamma())) * (1.0 + alpha * alpha)
       << " with N <= " << k_top << "; sum_{j>=" << k_min << "} b_j^4 = " << tail;
    throw ContractError(os.str());
  }
  AlphaResult res{base.data, RadiationProfile::zero(-grid.r_max(), grid.r_max(), 2 * grid.n() - 1), *N,
                  std::ldexp(1.0, *N), 0.0, 0.0, 0.0, 0.0, {}};
  for (int j = *N; j <= k_top; ++j) res.channel_tail += std::pow(b[static_cast<std::size_t>(j - k_min)], 4.0);
  const double RN = res.R_N;
  const double T = opts.probe_time > 0.0 ? opts.probe_time : RN;
  res.probe_time = T;
  if (RN + T >= grid.r_max()) {
    std::ostringstream os;
    os << "construct_alpha: grid r_max = " << grid.r_max() << " must exceed 2^N + probe_time = " << RN + T;
    throw ContractError(os.str());
  }
  if (alpha == 0.0) {
    res.history.push_back({1, 0.0, 0.0, 0.0});
    return res;
  }

  const Extracted v = extract_both(run_both(base.data, F, RN, T, "construct_alpha (base)"), RN);
  const double scale = std::ldexp(1.0, -(*N + 1));
  auto fill = [&](const RadiationProfile& G) {
    double outside = 0.0;
    for (std::size_t k = 0; k + 1 < G.n(); ++k) {
      const double a = G.s(k), c = G.s(k + 1);
      if (c <= -RN || a >= RN) outside += 0.5 * (G[k] + G[k + 1]) * (c - a);
    }
    const double level = scale * (alpha - outside);
    std::vector<double> vals(G.values().begin(), G.values().end());
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (std::abs(G.s(k)) <= RN) vals[k] = level;
    }
    return RadiationProfile(G.s_min(), G.s_max(), std::move(vals));
  };

  const double base_scale = profile_from_data(base.data).l2_norm();
  RadiationProfile G = fill(res.G);
  bool done = false;
  for (int it = 0; it < opts.max_iter && !done; ++it) {
    const RadialState data = base.data + data_from_profile(G, grid);
    const Extracted u = extract_both(run_both(data, F, RN, T, "construct_alpha"), RN);
    const Extracted lin =
        extract_both(run_both(data_from_profile(G, grid), Nonlinearity::zero(), RN, T, "construct_alpha"), RN);
    const RadiationProfile TG = fill(mapped(u.plus - v.plus - lin.plus, u.minus - v.minus - lin.minus, RN));
    const RadiationProfile next = blend(G, TG, opts.theta);
    const double change = (next - G).l2_norm();
    res.fixed_point_residual = (TG - G).l2_norm();
    G = next;
    done = record(res.history, change, u.discrepancy, G.l2_norm(), opts.tol, kRoundoff * (base_scale + G.l2_norm()),
                  res.contraction_ratio, "construct_alpha");
  }
  if (!done) {
    std::ostringstream os;
    os << "construct_alpha: no convergence in " << opts.max_iter << " iterations, last ratio "
       << res.history.back().ratio;
    throw NumericalError(os.str());
  }
  res.G = G;
  res.state = base.data + data_from_profile(G, grid);
  return res;
}

double exterior_energy_completed(const RadialState& state, double R) {
  const double e = exterior_energy(state, R).value;
  const double c = state.grid.r_max() * state.u.back();
  return std::sqrt(e * e + 4.0 * std::numbers::pi * c * c / state.grid.r_max());
}

}  // namespace ewl
