#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ewl/error.hpp"
#include "ewl/field_core.hpp"
#include "ewl/linear_radiation.hpp"
#include "ewl/nonlinear_evolve.hpp"

using namespace ewl;
using std::numbers::pi;

namespace {

double bump(double r, double c, double w) {
  const double x = (r - c) / w;
  return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
}

RadialState bump_state(const RadialGrid& g, double amp) {
  return RadialState::sample(g, [amp](double r) { return amp * bump(r, 0.0, 2.0); },
                             [amp](double r) { return 0.5 * amp * bump(r, 1.0, 1.0); });
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b, std::size_t stride_a = 1,
                std::size_t stride_b = 1, std::size_t count = 0) {
  double d = 0.0;
  if (count == 0) count = a.size();
  for (std::size_t i = 0; i < count; ++i) d = std::max(d, std::abs(a[i * stride_a] - b[i * stride_b]));
  return d;
}

double energy_norm_diff(const RadialState& a, const RadialState& b) {
  return exterior_energy(a - b, a.grid.r_min()).value;
}

}  // namespace

TEST_CASE("evolve refuses CFL violations and produces ceil(T/dt)+1 frames") {
  RadialGrid g(0.0, 10.0, 101);
  const auto s = bump_state(g, 0.1);
  CHECK_THROWS_AS(evolve(s, Nonlinearity::zero(), 1.0, 0.2), ContractError);
  EvolveOptions o;
  o.cfl = 1.5;
  CHECK_THROWS_AS(evolve(s, Nonlinearity::zero(), 1.0, 0.1, o), ContractError);
  const auto tr = evolve(s, Nonlinearity::zero(), 1.0, 0.1);
  CHECK(tr.states.size() == 11);
  CHECK(tr.back().t == doctest::Approx(1.0));
  tr.validate();
  const auto half = evolve(s, Nonlinearity::zero(), 1.0, 0.05);
  CHECK(half.states.size() == 21);
}

TEST_CASE("F = 0 matches the closed-form propagator at second order") {
  const auto G = random_smooth_profile(1, -40.0, 40.0, 160001, -2.0, 2.0);
  const double T = 5.0;
  double prev = 0.0;
  for (double h : {0.04, 0.02, 0.01}) {
    const auto g = RadialGrid::with_spacing(0.0, 12.0, h);
    const auto tr = evolve(data_from_profile(G, g), Nonlinearity::zero(), T, h);
    const auto ref = linear_evolve(G, T, g);
    const double err = std::max(max_diff(tr.back().u, ref.u), max_diff(tr.back().ut, ref.ut));
    if (prev > 0.0) CHECK(std::log2(prev / err) >= 1.8);
    prev = err;
  }
}

TEST_CASE("F = 0 with the box profile stays close to the closed form") {
  const auto G = RadiationProfile::sample(-40.0, 40.0, 80001, [](double s) { return std::abs(s) <= 1.0 ? 0.5 : 0.0; });
  const auto g = RadialGrid::with_spacing(0.0, 12.0, 0.01);
  const auto tr = evolve(data_from_profile(G, g), Nonlinearity::zero(), 5.0, 0.01);
  const auto ref = linear_evolve(G, 5.0, g);
  CHECK(max_diff(tr.back().u, ref.u) < 1e-2);
}

TEST_CASE("ground state is static under the focusing quintic") {
  // the ground state is linearly unstable: O(h^2) seeds grow like exp(3.4 t)
  const auto g = RadialGrid::with_spacing(0.0, 30.0, 0.005);
  const auto W = RadialState::sample(g, [](double r) { return 1.0 / std::sqrt(1.0 / 3.0 + r * r); },
                                     [](double) { return 0.0; });
  const auto tr = evolve(W, Nonlinearity::focusing_quintic(), 2.0, 0.005);
  REQUIRE_FALSE(tr.blowup);
  CHECK(energy_norm_diff(tr.back(), W) < 0.01 * exterior_energy(W, 0.0).value);
}

TEST_CASE("defocusing quintic conserves energy") {
  const auto g = RadialGrid::with_spacing(0.0, 25.0, 0.01);
  const auto s = bump_state(g, 1.0);
  const auto F = Nonlinearity::defocusing_quintic();
  EvolveOptions o;
  o.store_every = 100;
  const auto tr = evolve(s, F, 10.0, 0.01, o);
  const double E0 = conserved_energy(s, F);
  for (const auto& st : tr.states) CHECK(std::abs(conserved_energy(st, F) - E0) / E0 < 0.005);
}

TEST_CASE("exterior runs ignore the interior fill") {
  const auto g = RadialGrid::with_spacing(0.0, 20.0, 0.01);
  const double R = 2.0;
  auto outer = [](double r) { return 0.8 * bump(r, 4.0, 2.0) + 0.3 / (1.0 + r); };
  const auto a = RadialState::sample(g, [&](double r) { return r > R ? outer(r) : std::cos(r); },
                                     [](double r) { return r > 2.0 ? 0.0 : r; });
  const auto b = RadialState::sample(g, [&](double r) { return r > R ? outer(r) : 5.0 * std::exp(-r); },
                                     [](double r) { return r > 2.0 ? 0.0 : -3.0; });
  const auto F = Nonlinearity::focusing_quintic();
  const auto ta = evolve_exterior(a, F, R, 6.0, 0.01, {}, InteriorFill::AsGiven);
  const auto tb = evolve_exterior(b, F, R, 6.0, 0.01, {}, InteriorFill::AsGiven);
  REQUIRE(ta.states.size() == tb.states.size());
  double worst = 0.0;
  for (std::size_t n = 0; n < ta.states.size(); ++n) {
    const double t = ta.states[n].t;
    for (std::size_t i = 0; i < g.n(); ++i) {
      if (!ta.authoritative(g.r(i), t)) continue;
      worst = std::max({worst, std::abs(ta.states[n].u[i] - tb.states[n].u[i]),
                        std::abs(ta.states[n].ut[i] - tb.states[n].ut[i])});
    }
  }
  CHECK(worst <= 1e-8);
  CHECK(ta.cone_origin == R);
  CHECK_FALSE(ta.authoritative(R + 1.0, 1.5));
  CHECK(ta.authoritative(R + 1.0, 0.5));
}

TEST_CASE("finite speed of propagation in whole space") {
  const auto g = RadialGrid::with_spacing(0.0, 20.0, 0.02);
  const double a = 3.0;
  const auto s1 = bump_state(g, 0.5);
  auto s2 = s1;
  for (std::size_t i = 0; i < g.n(); ++i) {
    if (g.r(i) < a) s2.u[i] += 0.3 * bump(g.r(i), 1.5, 1.0);
  }
  const auto F = Nonlinearity::defocusing_quintic();
  const auto t1 = evolve(s1, F, 8.0, 0.02);
  const auto t2 = evolve(s2, F, 8.0, 0.02);
  double worst = 0.0;
  for (std::size_t n = 0; n < t1.states.size(); ++n) {
    const double t = t1.states[n].t;
    for (std::size_t i = 0; i < g.n(); ++i) {
      if (g.r(i) > a + t + 2.0 * g.h()) worst = std::max(worst, std::abs(t1.states[n].u[i] - t2.states[n].u[i]));
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("time reversal returns to the initial state") {
  const auto F = Nonlinearity::defocusing_quintic();
  const double T = 4.0;
  auto forward_back = [&](double h) {
    const auto g = RadialGrid::with_spacing(0.0, 15.0, h);
    const auto s = bump_state(g, 0.8);
    const auto fw = evolve(s, F, T, h);
    auto mid = fw.back();
    const auto bw = evolve(mid, F, -T, h);
    return std::make_pair(fw, bw);
  };
  const auto [fw, bw] = forward_back(0.02);
  const auto [fw2, bw2] = forward_back(0.01);
  // scheme error of the forward run in the energy norm, estimated against the
  // refined run restricted to the coarse nodes
  const auto& coarse = fw.back();
  RadialState fine = coarse;
  for (std::size_t i = 0; i < coarse.grid.n(); ++i) {
    fine.u[i] = fw2.back().u[2 * i];
    fine.ut[i] = fw2.back().ut[2 * i];
  }
  const double scheme = energy_norm_diff(coarse, fine);
  const double ret = energy_norm_diff(bw.back(), fw.states.front());
  MESSAGE("reversal " << ret << " scheme " << scheme);
  CHECK(bw.back().t == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ret <= 2.0 * scheme);
  (void)bw2;
  const auto times = bw.times();
  for (std::size_t i = 1; i < times.size(); ++i) CHECK(times[i] < times[i - 1]);
}

TEST_CASE("small data: deviation from the free wave scales like eps^5") {
  const auto g = RadialGrid::with_spacing(0.0, 16.0, 0.02);
  std::vector<double> eps{0.05, 0.1, 0.2}, dev;
  for (double e : eps) {
    const auto s = bump_state(g, e);
    const auto nl = evolve(s, Nonlinearity::focusing_quintic(), 4.0, 0.02);
    const auto lin = evolve(s, Nonlinearity::zero(), 4.0, 0.02);
    dev.push_back(energy_norm_diff(nl.back(), lin.back()));
  }
  const double slope = std::log(dev[2] / dev[0]) / std::log(eps[2] / eps[0]);
  CHECK(slope == doctest::Approx(5.0).epsilon(0.1));
}

TEST_CASE("duhamel_linear superposition and zero source") {
  const auto g = RadialGrid::with_spacing(0.0, 12.0, 0.02);
  const auto s = bump_state(g, 1.0);
  auto s1 = [](double r, double t) { return std::sin(3.0 * t) * bump(r, 2.0, 1.0); };
  auto s2 = [](double r, double t) { return std::exp(-t) * bump(r, 4.0, 1.5) * (1.0 + r); };
  auto sum = [&](double r, double t) { return s1(r, t) + s2(r, t); };
  const auto a = duhamel_linear(s, sum, 3.0, 0.02);
  const auto b = duhamel_linear(s, s1, 3.0, 0.02);
  const auto c = duhamel_linear(RadialState::zero(g), s2, 3.0, 0.02);
  double worst = 0.0;
  for (std::size_t n = 0; n < a.states.size(); ++n) {
    for (std::size_t i = 0; i < g.n(); ++i) {
      worst = std::max(worst, std::abs(a.states[n].u[i] - b.states[n].u[i] - c.states[n].u[i]));
    }
  }
  CHECK(worst < 1e-10);
  const auto z = duhamel_linear(s, nullptr, 3.0, 0.02);
  const auto e = evolve(s, Nonlinearity::zero(), 3.0, 0.02);
  CHECK(max_diff(z.back().u, e.back().u) == 0.0);
  CHECK(z.source_descriptor == "prescribed source");
}

TEST_CASE("evolve_exterior with F = 0 reduces to evolve") {
  const auto g = RadialGrid::with_spacing(0.0, 12.0, 0.02);
  const auto s = bump_state(g, 1.0);
  const auto a = evolve_exterior(s, Nonlinearity::zero(), 0.0, 3.0, 0.02);
  const auto b = evolve(s, Nonlinearity::zero(), 3.0, 0.02);
  CHECK(max_diff(a.back().u, b.back().u) == 0.0);
}

TEST_CASE("blow-up reports") {
  const auto g = RadialGrid::with_spacing(0.0, 12.0, 0.01);
  const auto big = RadialState::sample(g, [](double r) { return 8.0 * bump(r, 0.0, 2.0); },
                                       [](double) { return 0.0; });
  const auto tr = evolve(big, Nonlinearity::focusing_quintic(), 4.0, 0.01);
  REQUIRE(tr.blowup);
  CHECK(tr.blowup->authoritative);
  CHECK(tr.back().t < 4.0);
  // the same data on an exterior region far from the origin: the masked
  // blow-up is reported but does not stop the run
  const auto ex = evolve_exterior(big, Nonlinearity::focusing_quintic(), 3.0, 4.0, 0.01);
  CHECK(ex.back().t == doctest::Approx(4.0));
}

TEST_CASE("self_convergence verdicts") {
  const auto G = random_smooth_profile(4, -40.0, 40.0, 160001, -2.0, 2.0);
  auto smooth = [&](const RadialGrid& g) { return data_from_profile(G, g); };
  EvolveOptions half;
  half.cfl = 0.5;
  const auto lin = self_convergence(smooth, Nonlinearity::zero(), 3.0, 10.0, 0.04, half);
  CHECK(lin.verdict == ConvergenceVerdict::Pass);
  CHECK(lin.order == doctest::Approx(2.0).epsilon(0.1));
  // at CFL 1 the free scheme is exact up to the start step: at least as good
  const auto diamond = self_convergence(smooth, Nonlinearity::zero(), 3.0, 10.0, 0.04);
  CHECK(diamond.verdict == ConvergenceVerdict::Pass);

  auto small = [](const RadialGrid& g) { return bump_state(g, 0.7); };
  const auto nl = self_convergence(small, Nonlinearity::defocusing_quintic(), 3.0, 10.0, 0.04);
  CHECK(nl.order >= 1.8);
  CHECK(nl.verdict == ConvergenceVerdict::Pass);

  // discontinuous profile with its edges off the grid nodes: order degrades to ~1
  const auto box = RadiationProfile::sample(-40.0, 40.0, 160001, [](double x) { return std::abs(x) <= 1.013 ? 0.5 : 0.0; });
  auto kink = [&](const RadialGrid& g) { return data_from_profile(box, g); };
  const auto k = self_convergence(kink, Nonlinearity::zero(), 3.0, 10.0, 0.04, half);
  CHECK(k.order == doctest::Approx(1.0).epsilon(0.3));
  CHECK(k.verdict == ConvergenceVerdict::Inconclusive);
  // a jump in u0: the differences do not decrease at all
  auto jump = [](const RadialGrid& g) {
    return RadialState::sample(g, [](double r) { return r < 1.0 ? 1.0 : 0.0; }, [](double) { return 0.0; });
  };
  CHECK(self_convergence(jump, Nonlinearity::zero(), 3.0, 10.0, 0.04).verdict == ConvergenceVerdict::Inconclusive);
}
