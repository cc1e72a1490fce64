#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ewl/cli_runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = ewl::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("ewl_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json manifest(const fs::path& dir) { return json::parse(slurp(dir / "manifest.json")); }

}  // namespace

TEST_CASE("every command has defaults with an output directory") {
  const auto cmds = ewl::cli::commands();
  CHECK(cmds.size() == 13);
  for (const auto& c : cmds) CHECK(ewl::cli::defaults(c).contains("out"));
  CHECK(ewl::cli::defaults("verify decay").at("seed") == 0);
}

TEST_CASE("config errors exit with 2") {
  const auto dir = scratch("cfg");
  CHECK(run({"evolve", "--no_such_key", "1", "--out", dir.string()}).code == ewl::cli::kConfigError);
  CHECK(run({"evolve", "--T", "abc", "--out", dir.string()}).code == ewl::cli::kConfigError);
  CHECK(run({"evolve", "--store_every", "2.5", "--out", dir.string()}).code == ewl::cli::kConfigError);
  CHECK(run({"frobnicate"}).code == ewl::cli::kConfigError);
  CHECK(run({"profile"}).code == ewl::cli::kConfigError);
  CHECK(run({"evolve", "--F", "cubic", "--out", dir.string()}).code == ewl::cli::kConfigError);
  CHECK(run({"profile", "extract", "--out", dir.string()}).code == ewl::cli::kConfigError);

  const auto cfg = dir.string() + ".json";
  std::ofstream(cfg) << R"({"T": 1, "unknown": 2})";
  CHECK(run({"evolve", "--config", cfg}).code == ewl::cli::kConfigError);
  std::ofstream(cfg) << R"({"T": true})";
  CHECK(run({"evolve", "--config", cfg}).code == ewl::cli::kConfigError);
  fs::remove(cfg);
}

TEST_CASE("flags override config keys") {
  const auto dir = scratch("override");
  const auto cfg = dir.string() + ".json";
  std::ofstream(cfg) << json{{"T", 2.0}, {"r_max", 6.0}, {"h", 0.1}, {"out", dir.string()}}.dump();
  REQUIRE(run({"evolve", "--config", cfg, "--T", "1", "--exterior_R=-1"}).code == 0);
  const auto m = manifest(dir);
  CHECK(m["config"]["T"] == 1.0);
  CHECK(m["config"]["r_max"] == 6.0);
  CHECK(m["results"]["t_final"].get<double>() == doctest::Approx(1.0));
  CHECK(m["resolution"]["n"] == 61);
  fs::remove(cfg);
}

TEST_CASE("free evolution reports the closed-form comparison") {
  const auto dir = scratch("free");
  REQUIRE(run({"evolve", "--T", "2", "--r_max", "10", "--h", "0.01", "--store_every", "50", "--out", dir.string()})
              .code == 0);
  const auto m = manifest(dir);
  CHECK(m["results"]["closed_form_max_energy_error"].get<double>() < 2e-3);
  CHECK(fs::exists(dir / "closed_form_comparison.csv"));
  CHECK(fs::exists(dir / "trajectory" / "trajectory.json"));
}

TEST_CASE("unexpected blow-up exits with 3") {
  const auto dir = scratch("blowup");
  const std::vector<std::string> args{"evolve", "--F", "focusing_quintic", "--amplitude", "20", "--T", "3",
                                      "--r_max", "6", "--h", "0.02", "--out", dir.string()};
  CHECK(run(args).code == ewl::cli::kNumericalError);
  CHECK(manifest(dir)["status"].get<std::string>().find("numerical") == 0);
  auto expected = args;
  expected.insert(expected.end(), {"--expect_blowup", "true"});
  CHECK(run(expected).code == 0);
}

TEST_CASE("reruns reproduce byte-identical data files") {
  const auto a = scratch("idem_a"), b = scratch("idem_b");
  REQUIRE(run({"nonradiative", "--F", "defocusing_quintic", "--alpha", "0.5,1,2", "--out", a.string()}).code == 0);
  REQUIRE(run({"nonradiative", "--F", "defocusing_quintic", "--alpha", "0.5,1,2", "--out", b.string()}).code == 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().filename() == "manifest.json") continue;
    ++files;
    CHECK_MESSAGE(slurp(e.path()) == slurp(b / e.path().filename()), e.path().filename().string());
  }
  CHECK(files == 7);  // three csv/json pairs plus the tail-law table
  auto ca = manifest(a)["config"], cb = manifest(b)["config"];
  ca.erase("out");
  cb.erase("out");
  CHECK(ca == cb);
}

TEST_CASE("nonradiative tail-law table for the defocusing branches") {
  const auto dir = scratch("tail");
  REQUIRE(run({"nonradiative", "--F", "defocusing_quintic", "--alpha", "0.5,1,2", "--out", dir.string()}).code == 0);
  std::ifstream is(dir / "tail_law.csv");
  std::string line;
  std::getline(is, line);
  CHECK(line == "alpha,R,tail_energy,ratio");
  int rows = 0;
  while (std::getline(is, line)) {
    const double ratio = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(ratio >= 1.0);
    CHECK(ratio <= 13.0);
    ++rows;
  }
  CHECK(rows == 12);
}

TEST_CASE("profile extract and synthesize chain through files") {
  const auto ev = scratch("chain_ev"), ex = scratch("chain_ex"), sy = scratch("chain_sy");
  REQUIRE(run({"evolve", "--T", "4", "--r_max", "12", "--h", "0.02", "--store_every", "25", "--out", ev.string()})
              .code == 0);
  REQUIRE(run({"profile", "extract", "--input", (ev / "trajectory").string(), "--out", ex.string()}).code == 0);
  CHECK(manifest(ex)["results"]["direction"] == "positive");
  CHECK(manifest(ex)["resolution"].contains("probe_times"));
  REQUIRE(run({"profile", "synthesize", "--input", (ex / "profile.csv").string(), "--out", sy.string()}).code == 0);
  CHECK(manifest(sy)["results"]["isometry_relative_error"].get<double>() < 0.05);
}

TEST_CASE("verify exit code reflects the suite outcome") {
  const auto dir = scratch("verify");
  const auto r = run({"verify", "isometry", "--count", "3", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(run({"verify", "isometry", "--count", "1", "--out", dir.string()}).code == ewl::cli::kConfigError);
}
