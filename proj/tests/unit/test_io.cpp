#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "ewl/error.hpp"
#include "ewl/io.hpp"
#include "ewl/linear_radiation.hpp"

using namespace ewl;

TEST_CASE("num prints round-trippable full precision") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 12345.678901234567}) {
    CHECK(std::stod(io::num(x)) == x);
  }
  CHECK(io::num(0.5) == "0.5");
}

TEST_CASE("profile csv round trip is exact") {
  const auto G = random_smooth_profile(3, -4.0, 4.0, 161, -2.0, 2.0);
  std::stringstream ss;
  io::write_profile_csv(ss, G, 7.5);
  const auto back = io::read_profile_csv(ss);
  CHECK(back.t == 7.5);
  REQUIRE(back.G.n() == G.n());
  CHECK(back.G.s_min() == G.s_min());
  CHECK(back.G.s_max() == G.s_max());
  for (std::size_t k = 0; k < G.n(); ++k) CHECK(back.G[k] == G[k]);
}

TEST_CASE("state csv round trip is exact") {
  const RadialGrid g(0.0, 5.0, 51);
  const auto s = RadialState::sample(g, [](double r) { return std::exp(-r * r); }, [](double r) { return std::sin(r); }, 1.25);
  std::stringstream ss;
  io::write_state_csv(ss, s);
  const auto back = io::read_state_csv(ss);
  CHECK(back.grid == g);
  CHECK(back.t == 1.25);
  CHECK(back.u == s.u);
  CHECK(back.ut == s.ut);
}

TEST_CASE("malformed csv input is rejected") {
  SUBCASE("missing header") {
    std::stringstream ss("s,G\n0,1\n");
    CHECK_THROWS_AS(io::read_profile_csv(ss), ContractError);
  }
  SUBCASE("row count mismatch") {
    std::stringstream ss("# n=3,s_min=0,s_max=1,t=0\ns,G\n0,1\n0.5,2\n");
    CHECK_THROWS_AS(io::read_profile_csv(ss), ContractError);
  }
  SUBCASE("non-uniform grid") {
    std::stringstream ss("# n=3,s_min=0,s_max=1,t=0\ns,G\n0,1\n0.7,2\n1,3\n");
    CHECK_THROWS_AS(io::read_profile_csv(ss), ContractError);
  }
  SUBCASE("non-numeric value") {
    std::stringstream ss("# n=2,r_min=0,r_max=1,t=0\nr,u,ut\n0,abc,0\n1,0,0\n");
    CHECK_THROWS_AS(io::read_state_csv(ss), ContractError);
  }
}

TEST_CASE("trajectory directory round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "ewl_io_traj";
  std::filesystem::remove_all(dir);
  const RadialGrid g(0.0, 4.0, 41);
  Trajectory tr;
  tr.dt = 0.5;
  tr.scheme = "test";
  tr.cone_origin = 1.0;
  for (int k = 0; k < 3; ++k) {
    tr.states.push_back(RadialState::sample(g, [k](double r) { return k * r; }, [](double) { return 0.25; }, 0.5 * k));
  }
  io::write_trajectory(dir, tr);
  const auto back = io::read_trajectory(dir);
  REQUIRE(back.states.size() == 3);
  CHECK(back.dt == 0.5);
  CHECK(back.scheme == "test");
  REQUIRE(back.cone_origin.has_value());
  CHECK(*back.cone_origin == 1.0);
  CHECK(back.states[2].u == tr.states[2].u);
  CHECK(back.states[2].t == 1.0);
  std::filesystem::remove_all(dir);
  CHECK_THROWS(io::read_trajectory(dir));
}
