#include "ewl/nonradiative_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>

#include "ewl/error.hpp"
#include "ewl/nonlinear_evolve.hpp"

namespace ewl {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr std::size_t kTailNodes = 4001;

// Cubic Hermite interpolation on [x0, x1].
double hermite(double x, double x0, double x1, double f0, double f1, double d0, double d1) {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * f1 + (s3 - s2) * h * d1;
}

double hermite_slope(double x, double x0, double x1, double f0, double f1, double d0, double d1) {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * f0 + (3 * s2 - 4 * s + 1) * h * d0 + (-6 * s2 + 6 * s) * f1 + (3 * s2 - 2 * s) * h * d1) / h;
}

// Index i with xs[i] <= x <= xs[i+1] for increasing xs.
std::size_t bracket_increasing(const std::vector<double>& xs, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  return std::min(i, xs.size() - 2);
}

// Index i with xs[i] >= x >= xs[i+1] for decreasing xs.
std::size_t bracket_decreasing(const std::vector<double>& xs, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x, std::greater<double>());
  std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  return std::min(i, xs.size() - 2);
}

// Cumulative tail energy of the fixed-point part: E_tail(r_k) = int_{r_k}^{R_far}.
std::vector<double> tail_cumulative_energy(const TailSolution& t) {
  const std::size_t n = t.r.size();
  std::vector<double> E(n, 0.0);
  auto density = [&](std::size_t k) {
    const double d = t.w_r[k] - t.w[k] / t.r[k];
    return kFourPi * d * d * t.r[k];  // times r for the d(ln r) measure
  };
  for (std::size_t k = n - 1; k-- > 0;) {
    const double dl = std::log(t.r[k + 1] / t.r[k]);
    E[k] = E[k + 1] + 0.5 * dl * (density(k) + density(k + 1));
  }
  return E;
}

}  // namespace

double default_R_start(double gamma, double alpha) {
  return 4.0 * std::max(1.0, std::sqrt(16.0 * gamma / 3.0)) * (1.0 + alpha * alpha);
}

TailSolution tail_fixed_point(const Nonlinearity& F, double alpha, std::optional<double> R_start, double tol,
                              int max_iter) {
  if (!std::isfinite(alpha)) throw ContractError("tail_fixed_point: alpha must be finite");
  if (!F.flags().autonomous) throw ContractError("tail_fixed_point: F must be autonomous");
  TailSolution out;
  out.alpha = alpha;
  out.R_start = R_start.value_or(default_R_start(F.gamma(), alpha));
  if (!(out.R_start > 0.0)) throw ContractError("tail_fixed_point: R_start must be positive");
  out.R_far = 100.0 * out.R_start;
  const std::size_t n = kTailNodes;
  out.r.resize(n);
  const double L = std::log(out.R_far / out.R_start);
  for (std::size_t k = 0; k < n; ++k) out.r[k] = out.R_start * std::exp(L * static_cast<double>(k) / (n - 1));
  out.r.back() = out.R_far;
  out.w.assign(n, alpha);
  out.w_r.assign(n, 0.0);

  const double dl = L / static_cast<double>(n - 1);
  // the part beyond R_far with w frozen: x = R_far / tau maps (R_far, inf) to (0, 1)
  auto far_integrals = [&](double w_far) {
    double J0 = 0.0, J1 = 0.0;
    const double Rf = out.R_far;
    auto f = [&](double tau) { return tau * F(tau, 0.0, w_far / tau); };
    J0 = boost::math::quadrature::gauss<double, 30>::integrate(
        [&](double x) { return x <= 0.0 ? 0.0 : f(Rf / x) * Rf / (x * x); }, 0.0, 1.0);
    J1 = boost::math::quadrature::gauss<double, 30>::integrate(
        [&](double x) { return x <= 0.0 ? 0.0 : f(Rf / x) * Rf * Rf / (x * x * x); }, 0.0, 1.0);
    return std::pair{J0, J1};
  };

  std::vector<double> f(n), I0(n), I1(n), w_new(n), wr_new(n);
  double prev_change = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    for (std::size_t k = 0; k < n; ++k) f[k] = out.r[k] * F(out.r[k], 0.0, out.w[k] / out.r[k]);
    // I0(r) = int_r^{R_far} f, I1(r) = int_r^{R_far} tau f, trapezoid in ln tau
    I0[n - 1] = 0.0;
    I1[n - 1] = 0.0;
    for (std::size_t k = n - 1; k-- > 0;) {
      const double a0 = f[k] * out.r[k], b0 = f[k + 1] * out.r[k + 1];
      I0[k] = I0[k + 1] + 0.5 * dl * (a0 + b0);
      I1[k] = I1[k + 1] + 0.5 * dl * (a0 * out.r[k] + b0 * out.r[k + 1]);
    }
    const auto [J0, J1] = far_integrals(out.w.back());
    double change = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double c0 = I0[k] + J0, c1 = I1[k] + J1;
      w_new[k] = alpha - (c1 - out.r[k] * c0);
      wr_new[k] = c0;
      change = std::max(change, std::abs(w_new[k] - out.w[k]));
    }
    out.w.swap(w_new);
    out.w_r.swap(wr_new);
    out.history.push_back(change);
    out.iterations = it;
    out.residual = change;
    if (it >= 2 && prev_change > 0.0) {
      const double ratio = change / prev_change;
      // ratios are only meaningful above the rounding floor
      if (change > 1e3 * tol) out.contraction_ratio = std::max(out.contraction_ratio, ratio);
      if (ratio >= 1.0 && change > 1e3 * tol) {
        std::ostringstream os;
        os << "tail_fixed_point: map does not contract at R_start = " << out.R_start << " (ratio " << ratio
           << "); use a larger R_start";
        throw NumericalError(os.str());
      }
    }
    if (change <= tol * std::max(1.0, std::abs(alpha))) break;
    prev_change = change;
    if (it == max_iter) throw NumericalError("tail_fixed_point: no convergence within max_iter");
  }
  for (double wk : out.w) {
    if (std::abs(wk - alpha) > std::abs(alpha) + 1e-15) {
      throw NumericalError("tail_fixed_point: |w - alpha| exceeds |alpha| on the tail; use a larger R_start");
    }
  }
  const double a5 = std::pow(2.0 * std::abs(alpha), 5.0);
  out.truncation_bound = F.gamma() * a5 * (1.0 / (6.0 * out.R_far * out.R_far));
  return out;
}

std::string to_string(BranchClass c) { return c == BranchClass::Global ? "global" : "blowup"; }

std::string to_string(BlowupReason r) {
  switch (r) {
    case BlowupReason::None: return "none";
    case BlowupReason::Cap: return "cap";
    case BlowupReason::StepUnderflow: return "step_underflow";
    case BlowupReason::SingularAtOrigin: return "singular_at_origin";
  }
  return "unknown";
}

NonradiativeBranch integrate_inward(const Nonlinearity& F, const TailSolution& tail, double r_end, double cap) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 3>;  // w, w_r, e
  NonradiativeBranch b;
  b.alpha = tail.alpha;
  b.R_start = tail.R_start;
  b.tail = tail;
  auto rhs = [&F](const State& x, State& dx, double r) {
    const double u = x[0] / r;
    const double d = x[1] - u;
    dx[0] = x[1];
    dx[1] = -r * F(r, 0.0, u);
    dx[2] = -kFourPi * d * d;
  };
  auto stepper = odeint::make_controlled(1e-12, 1e-8, odeint::runge_kutta_dopri5<State>());
  State x{tail.w0(), tail.w0_r(), 0.0};
  double r = tail.R_start;
  auto record = [&]() {
    b.r.push_back(r);
    b.w.push_back(x[0]);
    b.w_r.push_back(x[1]);
    b.e.push_back(x[2]);
  };
  record();
  double dr = -0.01 * r;
  b.trust_radius = r_end;
  while (r > r_end) {
    dr = std::max(dr, -0.02 * r);
    if (r + dr < r_end) dr = r_end - r;
    if (std::abs(dr) < 1e-12 * r) {
      b.classification = BranchClass::Blowup;
      b.reason = BlowupReason::StepUnderflow;
      b.R_alpha = r;
      b.trust_radius = r;
      return b;
    }
    const State saved = x;
    const double r_saved = r;
    const auto res = stepper.try_step(rhs, x, r, dr);
    if (res != odeint::success) continue;  // dr was reduced
    if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || std::abs(x[0]) > cap) {
      x = saved;
      r = r_saved;
      b.classification = BranchClass::Blowup;
      b.reason = BlowupReason::Cap;
      b.R_alpha = r;
      b.trust_radius = r;
      return b;
    }
    record();
  }
  const double w_end = b.w.back(), wr_end = b.w_r.back();
  if (std::abs(w_end) <= 10.0 * std::abs(wr_end) * b.r.back() + 1e-6 * std::abs(b.alpha)) {
    b.classification = BranchClass::Global;
    b.reason = BlowupReason::None;
    b.central_slope = wr_end;
    b.R_alpha = 0.0;
  } else {
    // bounded w but u ~ w(0)/r is not in Hdot^1 near the origin
    b.classification = BranchClass::Blowup;
    b.reason = BlowupReason::SingularAtOrigin;
    b.R_alpha = 0.0;
  }
  return b;
}

NonradiativeBranch nonradiative_branch(const Nonlinearity& F, double alpha, std::optional<double> R_start) {
  return integrate_inward(F, tail_fixed_point(F, alpha, R_start));
}

double NonradiativeBranch::w_at(double x) const {
  if (x < trust_radius * (1.0 - 1e-12)) {
    if (classification == BranchClass::Global) return central_slope * x;
    throw ContractError("w_at: radius below the trust radius");
  }
  if (x >= tail.R_far) return tail.w.back();
  if (x >= R_start) {
    const std::size_t i = bracket_increasing(tail.r, x);
    return hermite(x, tail.r[i], tail.r[i + 1], tail.w[i], tail.w[i + 1], tail.w_r[i], tail.w_r[i + 1]);
  }
  if (r.size() < 2) return w.front();
  const std::size_t i = bracket_decreasing(r, x);
  return hermite(x, r[i], r[i + 1], w[i], w[i + 1], w_r[i], w_r[i + 1]);
}

double NonradiativeBranch::w_r_at(double x) const {
  if (x < trust_radius * (1.0 - 1e-12)) {
    if (classification == BranchClass::Global) return central_slope;
    throw ContractError("w_r_at: radius below the trust radius");
  }
  if (x >= tail.R_far) return 0.0;
  if (x >= R_start) {
    const std::size_t i = bracket_increasing(tail.r, x);
    return hermite_slope(x, tail.r[i], tail.r[i + 1], tail.w[i], tail.w[i + 1], tail.w_r[i], tail.w_r[i + 1]);
  }
  if (r.size() < 2) return w_r.front();
  const std::size_t i = bracket_decreasing(r, x);
  return hermite_slope(x, r[i], r[i + 1], w[i], w[i + 1], w_r[i], w_r[i + 1]);
}

double tail_energy(const NonradiativeBranch& b, double R) {
  if (!(R > 0.0)) throw ContractError("tail_energy: R must be positive");
  if (b.classification == BranchClass::Blowup && b.reason != BlowupReason::SingularAtOrigin && R <= b.trust_radius) {
    std::ostringstream os;
    os << "tail_energy: R = " << R << " is below the trust radius " << b.trust_radius;
    throw ContractError(os.str());
  }
  if (R < b.trust_radius * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "tail_energy: R = " << R << " is below the resolved radius " << b.trust_radius;
    throw ContractError(os.str());
  }
  const double wf = b.tail.w.back();
  const double far = kFourPi * wf * wf / b.tail.R_far;
  if (R >= b.tail.R_far) return std::sqrt(kFourPi * wf * wf / R);
  const auto Et = tail_cumulative_energy(b.tail);
  if (R >= b.R_start) {
    const std::size_t i = bracket_increasing(b.tail.r, R);
    // interpolate in ln r with the density as derivative
    auto dens = [&](std::size_t k) {
      const double d = b.tail.w_r[k] - b.tail.w[k] / b.tail.r[k];
      return -kFourPi * d * d * b.tail.r[k];
    };
    const double l0 = std::log(b.tail.r[i]), l1 = std::log(b.tail.r[i + 1]);
    const double E = hermite(std::log(R), l0, l1, Et[i], Et[i + 1], dens(i), dens(i + 1));
    return std::sqrt(std::max(E, 0.0) + far);
  }
  const std::size_t i = bracket_decreasing(b.r, R);
  auto dens = [&](std::size_t k) {
    const double d = b.w_r[k] - b.w[k] / b.r[k];
    return -kFourPi * d * d;
  };
  const double e = hermite(R, b.r[i], b.r[i + 1], b.e[i], b.e[i + 1], dens(i), dens(i + 1));
  return std::sqrt(std::max(e, 0.0) + Et.front() + far);
}

double radius_for_target(const NonradiativeBranch& b, double A) {
  if (!(A > 0.0)) throw ContractError("radius_for_target: A must be positive");
  double lo = b.trust_radius * (1.0 + 1e-9);
  if (b.classification == BranchClass::Blowup && b.reason != BlowupReason::SingularAtOrigin) lo = b.trust_radius * (1.0 + 1e-6);
  const double max_attainable = tail_energy(b, lo);
  if (A > max_attainable) {
    std::ostringstream os;
    os << "radius_for_target: A = " << A << " is not attained; the largest attainable value is " << max_attainable
       << " at r = " << lo;
    throw ContractError(os.str());
  }
  double hi = std::max(lo * 2.0, b.tail.R_far);
  while (tail_energy(b, hi) > A) hi *= 4.0;
  double llo = std::log(lo), lhi = std::log(hi);
  while (lhi - llo > 1e-7) {
    const double mid = 0.5 * (llo + lhi);
    if (tail_energy(b, std::exp(mid)) > A) llo = mid;
    else lhi = mid;
  }
  return std::exp(0.5 * (llo + lhi));
}

double ground_state_value(double alpha, double r) {
  if (alpha == 0.0) throw ContractError("ground state: alpha must be nonzero");
  const double a4 = alpha * alpha * alpha * alpha;
  return 1.0 / (alpha * std::sqrt(1.0 / 3.0 + r * r / a4));
}

GroundStateReference ground_state_reference(double alpha, const RadialGrid& grid) {
  GroundStateReference out{RadialState::sample(grid, [alpha](double r) { return ground_state_value(alpha, r); },
                                               [](double) { return 0.0; }),
                           0.0};
  const auto w = out.state.w();
  const double h2 = grid.h() * grid.h();
  for (std::size_t j = 1; j + 1 < grid.n(); ++j) {
    const double r = grid.r(j);
    const double u = out.state.u[j];
    out.residual = std::max(out.residual, std::abs((w[j + 1] - 2.0 * w[j] + w[j - 1]) / h2 + r * u * u * u * u * u));
  }
  return out;
}

RadialState branch_state(const NonradiativeBranch& b, const RadialGrid& grid, double R) {
  RadialState s = RadialState::zero(grid);
  const double floor_r = std::max(R, b.trust_radius);
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const double r = grid.r(i);
    if (r >= floor_r && r > 0.0) {
      s.u[i] = b.w_at(r) / r;
    } else if (b.classification == BranchClass::Global && R <= 0.0) {
      s.u[i] = r > b.trust_radius ? b.w_at(r) / r : b.central_slope;
    }
  }
  if (R > 0.0) s = clamp_interior(s, R);
  return s;
}

StaticCheck static_evolution_check(const NonradiativeBranch& b, const Nonlinearity& F, double R, double T, double h) {
  if (R <= 0.0 && b.classification != BranchClass::Global) {
    throw ContractError("static_evolution_check: a whole-space check needs a global branch");
  }
  if (R > 0.0 && R <= b.trust_radius) throw ContractError("static_evolution_check: R must exceed the trust radius");
  const double r_max = R + std::abs(T) + 10.0 + 20.0 * h;
  const RadialGrid grid = RadialGrid::with_spacing(0.0, r_max, h);
  const RadialState s0 = branch_state(b, grid, R);
  EvolveOptions opts;
  opts.store_every = std::max<std::size_t>(1, static_cast<std::size_t>(0.1 / h));
  const bool whole = R <= 0.0;
  const Trajectory tr = whole ? evolve(s0, F, T, h, opts) : evolve_exterior(s0, F, R, T, h, opts);
  if (tr.blowup && tr.blowup->authoritative) throw NumericalError("static_evolution_check: blow-up in the exterior");
  StaticCheck out;
  out.exterior_energy = exterior_energy(s0, std::max(R, 0.0)).value;
  for (const auto& s : tr.states) {
    RadialState d = s;
    for (std::size_t i = 0; i < grid.n(); ++i) d.u[i] -= s0.u[i];
    // the two-node stencil next to the cone sees non-authoritative values
    const double edge = whole ? 0.0 : std::abs(s.t) + R + 2.0 * h;
    if (edge >= grid.r_max()) break;
    out.max_deviation = std::max(out.max_deviation, exterior_energy(d, edge).value);
  }
  return out;
}

}  // namespace ewl
