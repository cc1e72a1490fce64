#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ewl/field_core.hpp"
#include "ewl/linear_radiation.hpp"

using namespace ewl;
using std::numbers::pi;

namespace {

double half_box(double s) { return std::abs(s) <= 1.0 ? 0.5 : 0.0; }
double odd_ramp(double s) { return std::abs(s) <= 1.0 ? s : 0.0; }

// Data-side squared energy ||(u0, u1)||^2 over the whole grid.
double data_energy_sq(const RadialState& s) {
  const double e = exterior_energy(s, s.grid.r_min()).value;
  return e * e;
}

}  // namespace

TEST_CASE("profile_from_data on closed-form pairs") {
  RadialGrid g(0.0, 4.0, 4001);
  const double h = g.h();
  const auto zero = profile_from_data(RadialState::zero(g));
  CHECK(zero.l2_norm() == 0.0);

  const auto s1 = RadialState::sample(g, [](double r) { return std::min(1.0, 1.0 / std::max(r, 1e-300)); },
                                      [](double) { return 0.0; });
  const auto G1 = profile_from_data(s1);
  for (std::size_t k = 0; k < G1.n(); ++k) {
    const double s = G1.s(k);
    if (std::abs(std::abs(s) - 1.0) <= 2.0 * h) continue;  // kinks
    CHECK(std::abs(G1[k] - half_box(s)) < 1e-5);
  }

  const auto s2 = RadialState::sample(g, [](double) { return 0.0; },
                                      [](double r) { return r < 1.0 ? 2.0 : 0.0; });
  const auto G2 = profile_from_data(s2);
  for (std::size_t k = 0; k < G2.n(); ++k) {
    const double s = G2.s(k);
    if (std::abs(std::abs(s) - 1.0) <= 2.0 * h) continue;
    CHECK(std::abs(G2[k] - odd_ramp(s)) < 1e-9);
  }
}

TEST_CASE("data_from_profile on closed-form pairs") {
  RadialGrid g(0.0, 4.0, 401);
  const auto Gh = RadiationProfile::sample(-4.0, 4.0, 8001, half_box);
  const auto s = data_from_profile(Gh, g);
  for (std::size_t i = 1; i < g.n(); ++i) {
    const double r = g.r(i);
    if (std::abs(r - 1.0) < 0.02) continue;
    CHECK(s.u[i] == doctest::Approx(std::min(1.0, 1.0 / r)).epsilon(1e-3));
    CHECK(std::abs(s.ut[i]) < 1e-12);
  }
  const auto Go = RadiationProfile::sample(-4.0, 4.0, 8001, odd_ramp);
  const auto so = data_from_profile(Go, g);
  for (std::size_t i = 1; i < g.n(); ++i) {
    const double r = g.r(i);
    if (std::abs(r - 1.0) < 0.02) continue;
    CHECK(std::abs(so.u[i]) < 1e-12);
    CHECK(so.ut[i] == doctest::Approx(r < 1.0 ? 2.0 : 0.0));
  }
  CHECK(data_from_profile(RadiationProfile::zero(-1, 1, 11), g).u[5] == 0.0);
}

TEST_CASE("linear_evolve closed form and t=0 consistency") {
  const auto G = RadiationProfile::sample(-30.0, 30.0, 60001, half_box);
  RadialGrid g(0.0, 20.0, 201);
  const auto s = linear_evolve(G, 10.0, g);
  // the sampled box edge adds h/2 of mass per side
  CHECK(s.u[100] == doctest::Approx(0.05).epsilon(2e-3));
  const auto a = linear_evolve(G, 0.0, g);
  const auto b = data_from_profile(G, g);
  for (std::size_t i = 0; i < g.n(); ++i) {
    CHECK(a.u[i] == b.u[i]);
    CHECK(a.ut[i] == b.ut[i]);
  }
  const auto z = linear_evolve(RadiationProfile::zero(-5, 5, 101), 3.0, g);
  CHECK(exterior_energy(z, 0.0).value == 0.0);
}

TEST_CASE("plus_profile reflections") {
  const auto even = RadiationProfile::sample(-2, 2, 401, [](double s) { return std::exp(-s * s); });
  const auto odd = RadiationProfile::sample(-2, 2, 401, odd_ramp);
  const auto pe = plus_profile(even);
  const auto po = plus_profile(odd);
  const auto back = plus_profile(pe);
  for (std::size_t k = 0; k < even.n(); ++k) {
    CHECK(pe[k] == doctest::Approx(-even[k]));
    CHECK(po[k] == doctest::Approx(odd[k]));
    CHECK(back[k] == even[k]);
  }
}

TEST_CASE("radial isometry constant 8 pi on the closed-form example") {
  const auto G = RadiationProfile::sample(-4.0, 4.0, 80001, half_box);
  CHECK(profile_energy(G) == doctest::Approx(4.0 * pi).epsilon(1e-3));
  // (min(1,1/r), 0): int_1^inf 4 pi r^2 r^-4 dr = 4 pi (grid-truncated at r_max)
  const double r_max = 4000.0;
  RadialGrid g(0.0, r_max, 400001);
  const auto s = RadialState::sample(g, [](double r) { return std::min(1.0, 1.0 / std::max(r, 1e-300)); },
                                     [](double) { return 0.0; });
  CHECK(data_energy_sq(s) + 4.0 * pi / r_max == doctest::Approx(4.0 * pi).epsilon(0.01));
  CHECK(profile_energy(RadiationProfile::zero(-1, 1, 3)) == 0.0);
}

TEST_CASE("isometry on random smooth profiles") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto G = random_smooth_profile(seed, -8.0, 8.0, 8192, -3.0, 3.0);
    RadialGrid g(0.0, 8.0, 4096);
    const auto d = data_from_profile(G, g);
    const double pe = profile_energy(G);
    // beyond the support u0 = (int G)/r exactly; its energy is 4 pi (int G)^2 / r_max
    const double q = G.integral();
    const double de = data_energy_sq(d) + 4.0 * pi * q * q / g.r_max();
    CHECK(std::abs(pe - de) / pe <= 0.005);
  }
}

TEST_CASE("round trip converges at second order") {
  const auto G = random_smooth_profile(3, -6.0, 6.0, 24001, -3.0, 3.0);
  double prev = 0.0;
  for (std::size_t n : {201u, 401u, 801u}) {
    RadialGrid g(0.0, 6.0, n);
    const auto s = data_from_profile(G.resampled(-6.0, 6.0, 2 * n - 1), g);
    const auto back = profile_from_data(s);
    const auto ref = G.resampled(-6.0, 6.0, 2 * n - 1);
    const double err = (back - ref).l2_norm();
    if (prev > 0.0) CHECK(std::log2(prev / err) >= 1.8);
    prev = err;
  }
}

TEST_CASE("propagator group law via profile invariance") {
  const auto G = random_smooth_profile(5, -20.0, 20.0, 8001, -2.0, 2.0);
  RadialGrid g(0.0, 10.0, 2001);
  const double t1 = 1.5, t2 = 2.0;
  const auto direct = linear_evolve(G, t1 + t2, g);
  // profile of the data at t1, read from the t1 state, is G shifted by t1
  RadialGrid wide(0.0, 20.0, 4001);
  const auto mid = linear_evolve(G, t1, wide);
  const auto H = profile_from_data(mid);
  const auto again = linear_evolve(H, t2, g);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    err = std::max(err, std::abs(direct.u[i] - again.u[i]));
    scale = std::max(scale, std::abs(direct.u[i]));
  }
  CHECK(err / scale < 1e-3);
}

TEST_CASE("free-wave energy is constant in time") {
  const auto G = random_smooth_profile(11, -40.0, 40.0, 16001, -2.0, 2.0);
  RadialGrid g(0.0, 30.0, 6001);
  const double e0 = exterior_energy(linear_evolve(G, 0.0, g), 0.0).value;
  for (double t : {1.0, 3.0, 7.0, 15.0, -9.0}) {
    CHECK(exterior_energy(linear_evolve(G, t, g), 0.0).value == doctest::Approx(e0).epsilon(0.01));
  }
}

TEST_CASE("far-field flux converges along a dyadic sweep") {
  // int_{r > t + R} |G_-(t - r) ... | written with G_+(r - t) = -G_-(t - r)
  const auto G = random_smooth_profile(2, -80.0, 80.0, 32001, -2.0, 2.0);
  const auto Gp = plus_profile(G);
  const double R = 0.5;
  double prev = 1e300;
  for (double t : {2.0, 4.0, 8.0, 16.0, 32.0}) {
    RadialGrid g(0.0, t + 6.0, static_cast<std::size_t>((t + 6.0) / 0.005) + 1);
    const auto s = linear_evolve(G, t, g);
    std::vector<double> f(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
      const double r = g.r(i);
      const double d = Gp.at(r - t) - r * s.ut[i];
      f[i] = d * d;
    }
    const double flux = integrate_interval(f, g, t + R, g.r_max());
    CHECK(flux < prev);
    prev = flux;
  }
}
