#include "ewl/nonlinear_evolve.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "ewl/error.hpp"

namespace ewl {

namespace {

using SourceFn = std::function<double(double r, double t, double u)>;

struct RunSpec {
  SourceFn source;           // F(r, t, u); empty means zero
  std::optional<double> R;   // exterior cone origin
  std::string descriptor;
};

double u_from_w(const std::vector<double>& w, const RadialGrid& grid, std::size_t j) {
  const double r = grid.r(j);
  if (r > 0.0) return w[j] / r;
  // w = kappa r + O(r^3) near the origin
  return (4.0 * w[1] - w[2]) / (2.0 * grid.h());
}

Trajectory run_leapfrog(const RadialState& data, const RunSpec& spec, double T, double dt,
                        const EvolveOptions& opts) {
  data.validate();
  const RadialGrid& grid = data.grid;
  const std::size_t n = grid.n();
  if (n < 3) throw ContractError("evolve: grid needs at least 3 nodes");
  if (!(dt > 0.0)) throw ContractError("evolve: dt must be positive");
  if (!(opts.cfl > 0.0) || opts.cfl > 1.0) {
    throw ContractError("evolve: CFL bound must lie in (0, 1]; leapfrog is unstable beyond 1");
  }
  if (dt > opts.cfl * grid.h() * (1.0 + 1e-12)) {
    throw ContractError("evolve: dt = " + std::to_string(dt) + " violates dt <= CFL*h = " +
                        std::to_string(opts.cfl * grid.h()) + "; refusing to run");
  }
  const std::size_t every = std::max<std::size_t>(opts.store_every, 1);
  const double sign = T < 0.0 ? -1.0 : 1.0;
  std::size_t steps = static_cast<std::size_t>(std::ceil(std::abs(T) / dt / static_cast<double>(every) - 1e-9)) * every;
  const double k = steps == 0 ? sign * dt : sign * std::abs(T) / static_cast<double>(steps);
  const double nu = std::abs(k) / grid.h();
  const double nu2 = nu * nu;
  const bool diamond = std::abs(nu - 1.0) < 1e-12;
  const bool origin = grid.touches_origin();

  Trajectory traj;
  traj.dt = k * static_cast<double>(every);
  traj.cone_origin = spec.R;
  traj.scheme = diamond ? "leapfrog-w (characteristic, nu=1)" : "leapfrog-w (nu<1, Taylor start)";
  traj.source_descriptor = spec.descriptor;

  const double t0 = data.t;
  auto active = [&](double r, double t) { return !spec.R || in_exterior(r, t, *spec.R); };
  auto source_term = [&](const std::vector<double>& w, double t, std::vector<double>& S) {
    std::fill(S.begin(), S.end(), 0.0);
    if (!spec.source) return;
    for (std::size_t j = 0; j < n; ++j) {
      const double r = grid.r(j);
      if (r <= 0.0 || !active(r, t)) continue;
      S[j] = r * spec.source(r, t, w[j] / r);
    }
  };

  std::vector<double> w_prev = data.w();
  std::vector<double> v0(n);
  for (std::size_t j = 0; j < n; ++j) v0[j] = grid.r(j) * data.ut[j];
  std::vector<double> w_cur(n), w_next(n);
  std::vector<double> S_prev(n), S_cur(n), S_next(n);
  auto d2 = [](const std::vector<double>& w, std::size_t j) { return w[j + 1] - 2.0 * w[j] + w[j - 1]; };

  // Start step. The source is sampled at the centroid time t0 + k/3 of the
  // first characteristic triangle, which makes the step third-order.
  {
    std::vector<double> w_third(n);
    for (std::size_t j = 0; j < n; ++j) w_third[j] = w_prev[j] + k / 3.0 * v0[j];
    source_term(w_third, t0 + k / 3.0, S_cur);
  }
  const double w_in = w_prev.front();
  const double w_out = w_prev.back();
  for (std::size_t j = 1; j + 1 < n; ++j) {
    if (diamond) {
      // d'Alembert over one cell with Simpson's rule for the velocity integral
      w_cur[j] = 0.5 * (w_prev[j + 1] + w_prev[j - 1]) + k / 6.0 * (v0[j - 1] + 4.0 * v0[j] + v0[j + 1]) +
                 0.5 * k * k * S_cur[j];
    } else {
      w_cur[j] = w_prev[j] + k * v0[j] + 0.5 * nu2 * d2(w_prev, j) + k * nu2 / 6.0 * d2(v0, j) +
                 0.5 * k * k * S_cur[j];
    }
  }
  w_cur.front() = origin ? 0.0 : w_in;
  w_cur.back() = w_out;

  auto make_frame = [&](const std::vector<double>& w, const std::vector<double>& wt, double t) {
    RadialState s = RadialState::zero(grid, t);
    for (std::size_t j = 0; j < n; ++j) {
      s.u[j] = u_from_w(w, grid, j);
      s.ut[j] = u_from_w(wt, grid, j);
    }
    return s;
  };

  traj.states.push_back(data);
  if (steps == 0) return traj;
  traj.states.reserve(steps / every + 1);

  std::vector<double> wt(n);
  std::vector<double> w_old2, w_old3, w_old4;  // earlier levels, kept for exterior runs only
  if (spec.R) w_old2 = w_old3 = w_old4 = std::vector<double>(n, 0.0);
  // Returns false if an authoritative sample exceeded the cap.
  auto screen = [&](std::vector<double>& w, double t) {
    for (std::size_t j = 0; j < n; ++j) {
      if (std::isfinite(w[j]) && std::abs(w[j]) <= opts.blowup_cap) continue;
      const double r = grid.r(j);
      const bool auth = active(r, t);
      if (!traj.blowup) traj.blowup = BlowupReport{t, r, auth};
      if (auth) {
        if (!traj.blowup->authoritative) traj.blowup = BlowupReport{t, r, true};
        return false;
      }
      w[j] = 0.0;  // masked region: causally irrelevant to the exterior
    }
    return true;
  };
  if (!screen(w_cur, t0 + k)) return traj;
  source_term(w_prev, t0, S_prev);
  source_term(w_cur, t0 + k, S_cur);

  for (std::size_t step = 1; step <= steps; ++step) {
    const double t = t0 + static_cast<double>(step) * k;
    for (std::size_t j = 1; j + 1 < n; ++j) {
      w_next[j] = 2.0 * (1.0 - nu2) * w_cur[j] + nu2 * (w_cur[j + 1] + w_cur[j - 1]) - w_prev[j] + k * k * S_cur[j];
    }
    w_next.front() = origin ? 0.0 : w_in;
    w_next.back() = w_out;
    if (!screen(w_next, t + k)) break;
    source_term(w_next, t + k, S_next);
    if (step % every == 0) {
      // centered difference with its leading error removed:
      // w_t = (w+ - w-)/2k - (k^2/6) w_ttt,  w_ttt = d_t (w_rr + S)
      wt.front() = 0.0;
      wt.back() = 0.0;
      for (std::size_t j = 1; j + 1 < n; ++j) {
        const double wttt = ((d2(w_next, j) - d2(w_prev, j)) / (grid.h() * grid.h()) + S_next[j] - S_prev[j]) / (2.0 * k);
        wt[j] = (w_next[j] - w_prev[j]) / (2.0 * k) - k * k / 6.0 * wttt;
      }
      if (!origin) wt.front() = 0.0;
      if (spec.R) {
        // The corrected difference reaches two cells inward. Next to the cone
        // use one-sided differences in time at the node itself instead, which
        // only see its own past and so stay inside the domain of dependence.
        const double edge = std::abs(t) + *spec.R + 2.0 * grid.h() * (1.0 + 1e-9);
        for (std::size_t j = 1; j + 1 < n && grid.r(j) <= edge; ++j) {
          if (!active(grid.r(j), t)) continue;
          if (step >= 4) {
            wt[j] = (25.0 * w_cur[j] - 48.0 * w_prev[j] + 36.0 * w_old2[j] - 16.0 * w_old3[j] + 3.0 * w_old4[j]) / (12.0 * k);
          } else if (step == 3) {
            wt[j] = (11.0 * w_cur[j] - 18.0 * w_prev[j] + 9.0 * w_old2[j] - 2.0 * w_old3[j]) / (6.0 * k);
          } else if (step == 2) {
            wt[j] = (3.0 * w_cur[j] - 4.0 * w_prev[j] + w_old2[j]) / (2.0 * k);
          } else {
            wt[j] = 2.0 * (w_cur[j] - w_prev[j]) / k - v0[j];
          }
        }
      }
      traj.states.push_back(make_frame(w_cur, wt, t));
    }
    if (spec.R) {
      std::swap(w_old4, w_old3);
      std::swap(w_old3, w_old2);
      std::swap(w_old2, w_prev);
    }
    std::swap(w_prev, w_cur);
    std::swap(w_cur, w_next);
    std::swap(S_prev, S_cur);
    std::swap(S_cur, S_next);
  }
  return traj;
}

}  // namespace

Trajectory evolve(const RadialState& data, const Nonlinearity& F, double T, double dt,
                  const EvolveOptions& opts) {
  RunSpec spec;
  if (!F.is_zero()) spec.source = [&F](double r, double t, double u) { return F(r, t, u); };
  spec.descriptor = F.name();
  return run_leapfrog(data, spec, T, dt, opts);
}

RadialState clamp_interior(const RadialState& data, double R) {
  data.validate();
  RadialState out = data;
  const RadialGrid& g = data.grid;
  if (R <= g.r_min()) return out;
  if (R > g.r_max()) throw ContractError("clamp_interior: R beyond the grid");
  // the boundary value is read at the first node >= R, since data below R
  // may be arbitrary
  const std::size_t iR = std::min(g.lower_index(R), g.n() - 1);
  const double uR = data.u[iR];
  for (std::size_t j = 0; j < g.n() && g.r(j) < R; ++j) {
    out.u[j] = uR;
    out.ut[j] = 0.0;
  }
  return out;
}

Trajectory evolve_exterior(const RadialState& data, const Nonlinearity& F, double R, double T,
                           double dt, const EvolveOptions& opts, InteriorFill fill) {
  if (!(R >= 0.0)) throw ContractError("evolve_exterior: R must be nonnegative");
  RunSpec spec;
  if (!F.is_zero()) spec.source = [&F](double r, double t, double u) { return F(r, t, u); };
  spec.R = R;
  spec.descriptor = F.name() + " (exterior)";
  const RadialState start = fill == InteriorFill::Clamp ? clamp_interior(data, R) : data;
  return run_leapfrog(start, spec, T, dt, opts);
}

Trajectory duhamel_linear(const RadialState& data, const std::function<double(double r, double t)>& source,
                          double T, double dt, const EvolveOptions& opts) {
  RunSpec spec;
  if (source) spec.source = [&source](double r, double t, double) { return source(r, t); };
  spec.descriptor = "prescribed source";
  return run_leapfrog(data, spec, T, dt, opts);
}

ConvergenceStudy self_convergence(const std::function<RadialState(const RadialGrid&)>& data,
                                  const Nonlinearity& F, double T, double r_max, double h,
                                  const EvolveOptions& opts) {
  std::array<RadialState, 3> finals{RadialState::zero(RadialGrid(0, 1, 2)), RadialState::zero(RadialGrid(0, 1, 2)),
                                    RadialState::zero(RadialGrid(0, 1, 2))};
  for (int level = 0; level < 3; ++level) {
    const double hl = h / static_cast<double>(1 << level);
    const RadialGrid grid = RadialGrid::with_spacing(0.0, r_max, hl);
    EvolveOptions o = opts;
    o.store_every = 1;
    Trajectory tr = evolve(data(grid), F, T, opts.cfl * hl, o);
    if (tr.blowup && tr.blowup->authoritative) {
      throw NumericalError("self_convergence: blow-up during refinement run");
    }
    finals[static_cast<std::size_t>(level)] = tr.back();
  }
  ConvergenceStudy study;
  study.h = h;
  const std::size_t n0 = finals[0].grid.n();
  for (int pair = 0; pair < 2; ++pair) {
    const auto& a = finals[static_cast<std::size_t>(pair)];
    const auto& b = finals[static_cast<std::size_t>(pair + 1)];
    const std::size_t sa = 1u << pair;
    double diff = 0.0;
    for (std::size_t i = 0; i < n0; ++i) {
      diff = std::max(diff, std::abs(a.u[i * sa] - b.u[i * sa * 2]));
      diff = std::max(diff, std::abs(a.ut[i * sa] - b.ut[i * sa * 2]));
    }
    study.differences[static_cast<std::size_t>(pair)] = diff;
  }
  const double d1 = study.differences[0];
  const double d2 = study.differences[1];
  if (!(d1 > 0.0) || !(d2 > 0.0) || d2 >= d1) {
    study.order = 0.0;
    study.verdict = ConvergenceVerdict::Inconclusive;
    return study;
  }
  study.order = std::log2(d1 / d2);
  if (study.order >= 1.8) study.verdict = ConvergenceVerdict::Pass;
  else if (study.order >= 0.5) study.verdict = ConvergenceVerdict::Inconclusive;
  else study.verdict = ConvergenceVerdict::Fail;
  return study;
}

std::string to_string(ConvergenceVerdict v) {
  switch (v) {
    case ConvergenceVerdict::Pass: return "pass";
    case ConvergenceVerdict::Inconclusive: return "inconclusive";
    case ConvergenceVerdict::Fail: return "fail";
  }
  return "unknown";
}

}  // namespace ewl
