#include <doctest.h>

#include <cmath>

#include "ewl/error.hpp"
#include "ewl/linear_radiation.hpp"
#include "ewl/nonlinear_evolve.hpp"
#include "ewl/nonlinearity.hpp"
#include "ewl/nonradiative_ode.hpp"
#include "ewl/scatter_analysis.hpp"

using namespace ewl;

namespace {

double bump(double r, double c, double w) {
  const double x = (r - c) / w;
  return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
}

RadialState bump_state(const RadialGrid& g, double amp) {
  return RadialState::sample(g, [amp](double r) { return amp * bump(r, 0.0, 2.0); },
                             [amp](double r) { return 0.5 * amp * bump(r, 1.0, 1.0); });
}

double rel_l2(const RadiationProfile& a, const RadiationProfile& b) {
  return (a - b).l2_norm() / b.l2_norm();
}

}  // namespace

TEST_CASE("extract_profile recovers the profile of free waves in both directions") {
  const RadialGrid g = RadialGrid::with_spacing(0.0, 40.0, 0.02);
  const RadialState data = bump_state(g, 1.0);
  const RadiationProfile Gm = profile_from_data(data);

  const Trajectory fwd = evolve(data, Nonlinearity::zero(), 16.0, g.h(), {1.0, 1e6, 50});
  const ProfileEstimate ep = extract_profile(fwd, Direction::Positive);
  CHECK(rel_l2(ep.G, plus_profile(Gm)) < 0.02);
  CHECK(ep.converged);
  REQUIRE(ep.discrepancy.size() == 3);
  // the probes approach each other like ||u||_{L^2(r > t)}
  CHECK(ep.discrepancy[1] < ep.discrepancy[0]);
  CHECK(ep.discrepancy[2] < ep.discrepancy[1]);

  const Trajectory bwd = evolve(data, Nonlinearity::zero(), -16.0, g.h(), {1.0, 1e6, 50});
  const ProfileEstimate em = extract_profile(bwd, Direction::Negative);
  CHECK(rel_l2(em.G, Gm) < 0.02);
  CHECK(em.discrepancy[2] < em.discrepancy[0]);
  CHECK(rel_l2(negative_profile(ep), Gm) < 0.02);

  CHECK_THROWS_AS(extract_profile(bwd, Direction::Positive), ContractError);
  CHECK_THROWS_AS(extract_profile(fwd, Direction::Negative), ContractError);
}

TEST_CASE("extract_profile with R_restrict only keeps s > R") {
  const RadialGrid g = RadialGrid::with_spacing(0.0, 40.0, 0.02);
  const RadialState data = bump_state(g, 1.0);
  const Trajectory fwd = evolve_exterior(data, Nonlinearity::zero(), 1.0, 16.0, g.h(), {1.0, 1e6, 50});
  const ProfileEstimate ep = extract_profile(fwd, Direction::Positive, 1.0);
  for (std::size_t k = 0; k < ep.G.n(); ++k) {
    if (ep.G.s(k) <= 1.0) CHECK(ep.G[k] == 0.0);
  }
  // beyond s = R the exterior evolution is exact, whatever sits inside
  const RadiationProfile Gp = plus_profile(profile_from_data(data));
  const double err = (ep.G - Gp).l2_norm(1.0 + 0.1, 20.0);
  CHECK(err < 0.02 * Gp.l2_norm(1.0, 20.0));
}

TEST_CASE("scattering defocusing solution: profile estimates settle, residual decays") {
  const RadialGrid g = RadialGrid::with_spacing(0.0, 50.0, 0.025);
  const RadialState data = bump_state(g, 3.0);
  const Trajectory tr = evolve(data, Nonlinearity::defocusing_quintic(), 32.0, g.h(), {1.0, 1e6, 8});
  const ProfileEstimate ep = extract_profile(tr, Direction::Positive, std::nullopt, {4.0, 8.0, 16.0, 32.0});
  REQUIRE(ep.change.size() == 3);
  CHECK(ep.change[2] < ep.change[0]);
  CHECK(ep.converged);

  const ScatterVerdict v = scattering_verdict(tr, 0.0);
  CHECK(v.kind == VerdictKind::Scatters);
  CHECK(v.residual.decreasing(1e-6 * v.initial_energy_sq));
  CHECK(v.residual.values.front() > 1e-6 * v.initial_energy_sq);
  CHECK(v.last_window_fraction < 0.05);
}

TEST_CASE("equiv_residual of a free wave against itself vanishes; mismatched inputs are refused") {
  const RadialGrid g = RadialGrid::with_spacing(0.0, 20.0, 0.05);
  const RadiationProfile G = random_smooth_profile(3, -20.0, 20.0, 801, -2.0, 2.0);
  const std::vector<double> times{0.0, 1.0, 2.0, 3.0};
  const Trajectory a = linear_trajectory(G, g, times);
  const ResidualCurve c = equiv_residual(a, a, 1.0);
  for (double x : c.values) CHECK(x == 0.0);
  CHECK(c.equivalent(1e-12));

  const Trajectory b = linear_trajectory(G, RadialGrid::with_spacing(0.0, 20.0, 0.1), times);
  CHECK_THROWS_AS(equiv_residual(a, b, 1.0), ContractError);

  // a free wave and its exact translate-free copy from evolve agree to scheme accuracy
  const Trajectory e = evolve(data_from_profile(G, g), Nonlinearity::zero(), 3.0, g.h());
  const Trajectory l = linear_trajectory(G, g, e.times());
  const ResidualCurve d = equiv_residual(e, l, 0.0);
  for (double x : d.values) CHECK(x < 1e-4);
}

TEST_CASE("characteristic number of the ground state with respect to zero") {
  const RadialGrid g = RadialGrid::with_spacing(0.0, 200.0, 0.01);
  for (double alpha : {0.5, 1.0, 2.0}) {
    const RadialState u = ground_state_reference(alpha, g).state;
    const RadialState v = RadialState::zero(g);
    const CharacteristicNumber c = characteristic_number(u, v);
    CHECK(c.alpha_fit == doctest::Approx(alpha).epsilon(1e-3));
    CHECK(c.alpha_int == doctest::Approx(alpha).epsilon(1e-3));
    CHECK(c.agreement < 1e-3);
    CHECK(c.reliable);
  }
  const RadialState z = RadialState::zero(g);
  const CharacteristicNumber c0 = characteristic_number(z, z);
  CHECK(c0.alpha_fit == 0.0);
  CHECK(c0.alpha_int == 0.0);
  CHECK(c0.reliable);
}

TEST_CASE("characteristic number is invariant under time translation") {
  // a 1/r tail plus a compact outgoing pulse, evolved freely
  const RadialGrid g = RadialGrid::with_spacing(0.0, 120.0, 0.02);
  const RadialState data = RadialState::sample(
      g, [](double r) { return 0.7 / std::sqrt(1.0 + r * r) + bump(r, 0.0, 2.0); },
      [](double) { return 0.0; });
  const double t0 = 10.0;
  const Trajectory tr = evolve(data, Nonlinearity::zero(), t0, g.h(), {1.0, 1e6, 50});
  const RadialState z0 = RadialState::zero(g, 0.0);
  const RadialState z1 = RadialState::zero(g, tr.back().t);
  const auto c0 = characteristic_number(tr.states.front(), z0, std::pair{40.0, 90.0});
  const auto c1 = characteristic_number(tr.back(), z1, std::pair{40.0 + t0, 90.0 + t0});
  CHECK(c1.alpha_fit == doctest::Approx(c0.alpha_fit).epsilon(0.02));
  CHECK(c1.alpha_int == doctest::Approx(c0.alpha_int).epsilon(0.02));
  CHECK(c0.alpha_fit == doctest::Approx(0.7).epsilon(0.01));

  CHECK_THROWS_AS(characteristic_number(tr.back(), z0), ContractError);
  CHECK_THROWS_AS(characteristic_number(z0, z0, std::pair{5.0, 4.0}), ContractError);
}

TEST_CASE("scattering_verdict reports authoritative blow-up") {
  const RadialGrid g = RadialGrid::with_spacing(0.0, 12.0, 0.01);
  const RadialState u0 = 1.5 * ground_state_reference(1.0, g).state;
  const Trajectory tr = evolve(u0, Nonlinearity::focusing_quintic(), 6.0, g.h(), {1.0, 1e6, 10});
  const ScatterVerdict v = scattering_verdict(tr, 0.0);
  CHECK(v.kind != VerdictKind::Scatters);
  if (tr.blowup && tr.blowup->authoritative) CHECK(v.kind == VerdictKind::Blowup);
  CHECK(to_string(VerdictKind::Blowup) == "blowup");
}

TEST_CASE("time_window selects frames by |t|") {
  const RadialGrid g = RadialGrid::with_spacing(0.0, 10.0, 0.1);
  const Trajectory tr = evolve(bump_state(g, 0.1), Nonlinearity::zero(), -4.0, g.h(), {1.0, 1e6, 10});
  const Trajectory w = time_window(tr, 1.0, 2.0);
  REQUIRE(w.states.size() == 2);
  CHECK(w.states.front().t == doctest::Approx(-1.0));
  CHECK(w.states.back().t == doctest::Approx(-2.0));
}

TEST_CASE("residual curve monotonicity respects the noise floor") {
  ResidualCurve c{{1, 2, 3, 4}, {1.0, 0.5, 1e-9, 2e-9}};
  CHECK_FALSE(c.decreasing());
  CHECK(c.decreasing(1e-8));
  CHECK(c.equivalent(1e-8, 1e-8));
  CHECK_FALSE(c.equivalent(1e-10, 1e-8));
  ResidualCurve up{{1, 2}, {0.1, 0.2}};
  CHECK_FALSE(up.decreasing(1e-3));
}
