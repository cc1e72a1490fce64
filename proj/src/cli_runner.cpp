#include "ewl/cli_runner.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "ewl/error.hpp"
#include "ewl/family_construct.hpp"
#include "ewl/io.hpp"
#include "ewl/nonlinear_evolve.hpp"
#include "ewl/nonlinearity.hpp"
#include "ewl/nonradiative_ode.hpp"
#include "ewl/scatter_analysis.hpp"
#include "ewl/spacetime_norms.hpp"
#include "ewl/verify.hpp"

namespace ewl::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

class ConfigError : public ContractError {
 public:
  using ContractError::ContractError;
};

class VerifyFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::map<std::string, json>& schemas() {
  static const std::map<std::string, json> s = [] {
    std::map<std::string, json> m;
    m["evolve"] = {{"out", "out"},           {"F", "zero"},       {"gamma", 1.0},      {"data", "bump"},
                   {"input", ""},            {"amplitude", 1.0},  {"center", 0.0},     {"width", 2.0},
                   {"alpha", 1.0},           {"r_max", 20.0},     {"h", 0.02},         {"T", 5.0},
                   {"cfl", 1.0},             {"store_every", 10}, {"exterior_R", -1.0}, {"fill", "clamp"},
                   {"blowup_cap", 1e6},      {"expect_blowup", false}};
    m["profile extract"] = {{"out", "out"},        {"input", ""},      {"direction", "auto"},
                            {"R_restrict", -1.0},  {"probe_times", json::array()}, {"tol", 1e-2}};
    m["profile synthesize"] = {{"out", "out"}, {"input", ""}, {"r_max", 0.0}, {"h", 0.0}};
    m["norms"] = {{"out", "out"},   {"input", ""},  {"exterior", json::array({0.0})},
                  {"channel", json::array()}, {"k_min", 0}, {"k_max", -1}, {"F", ""}, {"gamma", 1.0}};
    m["nonradiative"] = {{"out", "out"},        {"F", "focusing_quintic"}, {"gamma", 1.0},
                         {"alpha", json::array({1.0})}, {"R_start", 0.0}, {"R", json::array()},
                         {"target_A", 0.0},     {"r_end", 1e-6}};
    m["charnum"] = {{"out", "out"}, {"u", ""}, {"v", ""}, {"window", json::array()}};
    m["construct primary"] = {{"out", "out"},      {"profile", ""},  {"scale", 1.0},   {"F", "focusing_quintic"},
                              {"gamma", 1.0},      {"R", 1.0},       {"h", 0.05},      {"probe_time", 30.0},
                              {"r_max", 0.0},      {"theta", 1.0},   {"max_iter", 50}, {"tol", 1e-6},
                              {"delta", 0.9}};
    m["construct alpha"] = {{"out", "out"},      {"base", ""},         {"base_R", 0.0},   {"r_max", 200.0},
                            {"h", 0.05},         {"F", "defocusing_quintic"}, {"gamma", 1.0}, {"alpha", 1.0},
                            {"n_factor", 10.0},  {"c", 1.0},           {"tail_threshold", 1e-2},
                            {"probe_time", 0.0}, {"theta", 1.0},       {"max_iter", 50},  {"tol", 1e-6}};
    m["scatter-experiment"] = {{"out", "out"},          {"F", "defocusing_quintic"}, {"gamma", 1.0},
                               {"data", "bump"},        {"input", ""},        {"amplitude", 3.0},
                               {"center", 0.0},         {"width", 2.0},       {"r_max", 0.0},
                               {"h", 0.025},            {"T", 40.0},          {"R", 0.0},
                               {"store_every", 0},      {"y_fraction_tol", 0.05}, {"residual_tol", 0.01},
                               {"residual_floor", 1e-6}, {"checkpoints", 5},  {"expect_blowup", false}};
    for (const char* suite : {"verify decay", "verify isometry", "verify conservation", "verify all"}) {
      m[suite] = {{"out", "out"}, {"seed", 0}, {"count", 10}};
    }
    return m;
  }();
  return s;
}

json parse_value(const std::string& key, const json& def, const std::string& text) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      const double x = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("");
      return x;
    } catch (const std::exception&) {
      throw ConfigError("--" + key + ": expected a number, got '" + s + "'");
    }
  };
  if (def.is_boolean()) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError("--" + key + ": expected true or false, got '" + text + "'");
  }
  if (def.is_number_integer()) {
    const double x = number(text);
    if (x != std::floor(x)) throw ConfigError("--" + key + ": expected an integer, got '" + text + "'");
    return static_cast<long long>(x);
  }
  if (def.is_number()) return number(text);
  if (def.is_array()) {
    json a = json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) a.push_back(number(item));
    }
    return a;
  }
  return text;
}

void check_type(const std::string& key, const json& def, const json& v) {
  bool ok = false;
  if (def.is_boolean()) ok = v.is_boolean();
  else if (def.is_number_integer()) ok = v.is_number_integer() || (v.is_number() && v.get<double>() == std::floor(v.get<double>()));
  else if (def.is_number()) ok = v.is_number();
  else if (def.is_string()) ok = v.is_string();
  else if (def.is_array()) {
    ok = v.is_array();
    if (ok) {
      for (const auto& x : v) ok = ok && x.is_number();
    }
  }
  if (!ok) throw ConfigError("config key '" + key + "' has the wrong type (default: " + def.dump() + ")");
}

json effective_config(const std::string& command, const std::string& config_path,
                      const std::vector<std::string>& extras) {
  json cfg = defaults(command);
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw ConfigError("cannot read config file " + config_path);
    json file;
    try {
      is >> file;
    } catch (const json::exception& e) {
      throw ConfigError("config file " + config_path + ": " + e.what());
    }
    if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [k, v] : file.items()) {
      if (!cfg.contains(k)) throw ConfigError("unknown config key '" + k + "' for " + command);
      check_type(k, cfg[k], v);
      cfg[k] = cfg[k].is_number_integer() ? json(static_cast<long long>(v.get<double>())) : v;
    }
  }
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& a = extras[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3) throw ConfigError("unexpected argument '" + a + "'");
    std::string key = a.substr(2), value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= extras.size()) throw ConfigError("--" + key + " needs a value");
      value = extras[++i];
    }
    if (!cfg.contains(key)) throw ConfigError("unknown option --" + key + " for " + command);
    cfg[key] = parse_value(key, cfg[key], value);
  }
  return cfg;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Ctx {
  std::string command;
  json cfg;
  fs::path out_dir;
  json results = json::object();
  json resolution = json::object();
  std::vector<std::string> outputs;
  std::ostream& out;

  double num(const char* k) const { return cfg.at(k).get<double>(); }
  long long integer(const char* k) const { return cfg.at(k).get<long long>(); }
  std::string str(const char* k) const { return cfg.at(k).get<std::string>(); }
  bool flag(const char* k) const { return cfg.at(k).get<bool>(); }
  std::vector<double> list(const char* k) const { return cfg.at(k).get<std::vector<double>>(); }

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return out_dir / name;
  }
  void grid_resolution(const RadialGrid& g) {
    resolution["n"] = g.n();
    resolution["r_min"] = g.r_min();
    resolution["r_max"] = g.r_max();
    resolution["h"] = g.h();
  }
};

Nonlinearity make_F(const Ctx& c) {
  try {
    return Nonlinearity::from_name(c.str("F"), c.num("gamma"));
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
}

std::string required_path(const Ctx& c, const char* key) {
  const std::string p = c.str(key);
  if (p.empty()) throw ConfigError("config key '" + std::string(key) + "' (input path) is required");
  return p;
}

double bump(double r, double c, double w) {
  const double x = (r - c) / w;
  return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
}

RadialState bump_data(const RadialGrid& g, double amp, double center, double width) {
  if (!(width > 0.0)) throw ConfigError("width must be positive");
  return RadialState::sample(g, [=](double r) { return amp * bump(r, center, width); }, [](double) { return 0.0; });
}

RadiationProfile on_grid(const RadiationProfile& G, const RadialGrid& g) {
  return RadiationProfile::sample(-g.r_max(), g.r_max(), 2 * g.n() - 1, [&G](double s) { return G.at(s); });
}

int cmd_evolve(Ctx& c) {
  const Nonlinearity F = make_F(c);
  RadialGrid grid = RadialGrid::with_spacing(0.0, c.num("r_max"), c.num("h"));
  RadialState data = RadialState::zero(grid);
  const std::string kind = c.str("data");
  if (kind == "bump") {
    data = bump_data(grid, c.num("amplitude"), c.num("center"), c.num("width"));
  } else if (kind == "ground_state") {
    data = ground_state_reference(c.num("alpha"), grid).state;
  } else if (kind == "profile") {
    data = data_from_profile(on_grid(io::read_profile_csv(fs::path(required_path(c, "input"))).G, grid), grid);
  } else if (kind == "state") {
    data = io::read_state_csv(fs::path(required_path(c, "input")));
    grid = data.grid;
  } else {
    throw ConfigError("data must be bump|ground_state|profile|state");
  }
  EvolveOptions o;
  o.cfl = c.num("cfl");
  o.blowup_cap = c.num("blowup_cap");
  if (c.integer("store_every") < 1) throw ConfigError("store_every must be at least 1");
  o.store_every = static_cast<std::size_t>(c.integer("store_every"));
  const double dt = o.cfl * grid.h();
  const double R = c.num("exterior_R");
  const std::string fill = c.str("fill");
  if (fill != "clamp" && fill != "as_given") throw ConfigError("fill must be clamp|as_given");
  const Trajectory tr = R >= 0.0 ? evolve_exterior(data, F, R, c.num("T"), dt, o,
                                                   fill == "clamp" ? InteriorFill::Clamp : InteriorFill::AsGiven)
                                 : evolve(data, F, c.num("T"), dt, o);
  c.grid_resolution(grid);
  c.resolution["dt"] = dt;
  c.resolution["frame_dt"] = tr.dt;
  io::write_trajectory(c.file("trajectory"), tr);
  c.results["frames"] = tr.states.size();
  c.results["t_final"] = tr.back().t;
  c.results["scheme"] = tr.scheme;
  if (tr.blowup) {
    c.results["blowup"] = {{"t", tr.blowup->t}, {"r", tr.blowup->r}, {"authoritative", tr.blowup->authoritative}};
  }
  if (F.has_potential() && R < 0.0) {
    const double E0 = conserved_energy(tr.states.front(), F);
    const double E1 = conserved_energy(tr.back(), F);
    c.results["energy_initial"] = E0;
    c.results["energy_final"] = E1;
  }
  if (F.is_zero() && R < 0.0 && grid.touches_origin()) {
    const RadiationProfile G = profile_from_data(data);
    std::ostringstream csv;
    csv << "t,energy_error,max_abs_u_error\n";
    double worst = 0.0;
    for (const auto& s : tr.states) {
      const RadialState exact = linear_evolve(G, s.t, grid);
      const double e = exterior_energy(s - exact, 0.0).value;
      double m = 0.0;
      for (std::size_t i = 0; i < grid.n(); ++i) m = std::max(m, std::abs(s.u[i] - exact.u[i]));
      worst = std::max(worst, e);
      csv << io::num(s.t) << ',' << io::num(e) << ',' << io::num(m) << '\n';
    }
    io::write_text(c.file("closed_form_comparison.csv"), csv.str());
    c.results["closed_form_max_energy_error"] = worst;
  }
  c.out << "evolve: " << tr.states.size() << " frames to t = " << tr.back().t << "\n";
  if (tr.blowup && tr.blowup->authoritative && !c.flag("expect_blowup")) {
    throw NumericalError("blow-up at t = " + std::to_string(tr.blowup->t) + ", r = " + std::to_string(tr.blowup->r));
  }
  return kOk;
}

int cmd_profile_extract(Ctx& c) {
  const Trajectory tr = io::read_trajectory(fs::path(required_path(c, "input")));
  std::string dir = c.str("direction");
  if (dir == "auto") dir = tr.back().t > 0.0 ? "positive" : "negative";
  if (dir != "positive" && dir != "negative") throw ConfigError("direction must be auto|positive|negative");
  const double R = c.num("R_restrict");
  const auto est = extract_profile(tr, dir == "positive" ? Direction::Positive : Direction::Negative,
                                   R >= 0.0 ? std::optional<double>(R) : std::nullopt, c.list("probe_times"),
                                   c.num("tol"));
  io::write_profile_csv(c.file("profile.csv"), est.G, est.probe_times.back());
  std::ostringstream csv;
  csv << "t,probe_discrepancy,relative_change\n";
  for (std::size_t i = 0; i < est.probe_times.size(); ++i) {
    csv << io::num(est.probe_times[i]) << ',' << io::num(est.discrepancy[i]) << ','
        << (i == 0 ? std::string("") : io::num(est.change[i - 1])) << '\n';
  }
  io::write_text(c.file("probes.csv"), csv.str());
  c.grid_resolution(tr.grid());
  c.resolution["frame_dt"] = tr.dt;
  c.resolution["probe_times"] = est.probe_times;
  c.results["direction"] = dir;
  c.results["converged"] = est.converged;
  c.out << "profile extract: " << dir << " profile, converged = " << (est.converged ? "yes" : "no") << "\n";
  return kOk;
}

int cmd_profile_synthesize(Ctx& c) {
  const auto pf = io::read_profile_csv(fs::path(required_path(c, "input")));
  const RadiationProfile& G = pf.G;
  const double r_max = c.num("r_max") > 0.0 ? c.num("r_max") : std::max(std::abs(G.s_min()), std::abs(G.s_max()));
  const double h = c.num("h") > 0.0 ? c.num("h") : G.h();
  const RadialGrid grid = RadialGrid::with_spacing(0.0, r_max, h);
  const RadiationProfile Gg = on_grid(G, grid);
  const RadialState d = data_from_profile(Gg, grid);
  io::write_state_csv(c.file("state.csv"), d);
  const double e = exterior_energy(d, 0.0).value;
  const double tail = grid.r_max() * d.u.back();
  const double data_sq = e * e + 4.0 * std::numbers::pi * tail * tail / grid.r_max();
  c.grid_resolution(grid);
  c.results["profile_energy"] = profile_energy(Gg);
  c.results["data_energy_sq"] = data_sq;
  c.results["isometry_relative_error"] = std::abs(profile_energy(Gg) - data_sq) / std::max(profile_energy(Gg), 1e-300);
  c.out << "profile synthesize: " << grid.n() << " nodes\n";
  return kOk;
}

int cmd_norms(Ctx& c) {
  const Trajectory tr = io::read_trajectory(fs::path(required_path(c, "input")));
  std::vector<io::RegionRow> rows;
  for (double R : c.list("exterior")) {
    const auto r = y_norm(tr, RegionSpec::exterior(R));
    rows.push_back({"Y " + RegionSpec::exterior(R).describe(), r.value, r.error});
  }
  for (double R : c.list("channel")) {
    const auto r = y_norm(tr, RegionSpec::channel(R));
    rows.push_back({"Y " + RegionSpec::channel(R).describe(), r.value, r.error});
  }
  if (!c.str("F").empty()) {
    const Nonlinearity F = make_F(c);
    for (double R : c.list("exterior")) {
      const auto r = source_l1l2_norm(tr, F, RegionSpec::exterior(R));
      rows.push_back({"L1L2 source " + RegionSpec::exterior(R).describe(), r.value, r.error});
    }
  }
  io::write_region_table(c.file("regions.csv"), rows);
  if (c.integer("k_max") >= c.integer("k_min")) {
    const auto ch = dyadic_channel_norms(tr, static_cast<int>(c.integer("k_min")), static_cast<int>(c.integer("k_max")));
    io::write_channel_csv(c.file("channels.csv"), ch);
    c.results["channel_sum_squares"] = ch.sum_squares;
  }
  c.grid_resolution(tr.grid());
  c.resolution["frame_dt"] = tr.dt;
  c.resolution["t_span"] = {tr.states.front().t, tr.back().t};
  for (const auto& r : rows) c.results[r.region] = {{"value", r.value}, {"error", r.error}};
  c.out << "norms: " << rows.size() << " regions\n";
  return kOk;
}

std::string tag(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

int cmd_nonradiative(Ctx& c) {
  const Nonlinearity F = make_F(c);
  const auto alphas = c.list("alpha");
  if (alphas.empty()) throw ConfigError("alpha list is empty");
  std::ostringstream law;
  law << "alpha,R,tail_energy,ratio\n";
  json branches = json::array();
  for (double alpha : alphas) {
    const auto tail = tail_fixed_point(F, alpha, c.num("R_start") > 0.0 ? std::optional<double>(c.num("R_start"))
                                                                        : std::nullopt);
    const auto b = integrate_inward(F, tail, c.num("r_end"));
    const std::string name = "branch_alpha_" + tag(alpha);
    io::write_branch_csv(c.file(name + ".csv"), b);
    json summary = io::branch_summary(b);
    std::vector<double> Rs = c.list("R");
    if (Rs.empty() && alpha != 0.0) {
      const double base = 4.0 * (1.0 + std::sqrt(F.gamma())) * alpha * alpha;
      Rs = {base, 2.0 * base, 4.0 * base, 8.0 * base};
    }
    for (double R : Rs) {
      if (R <= b.trust_radius) continue;
      const double te = tail_energy(b, R);
      law << io::num(alpha) << ',' << io::num(R) << ',' << io::num(te) << ','
          << io::num(alpha != 0.0 ? te * std::sqrt(R) / std::abs(alpha) : 0.0) << '\n';
    }
    if (c.num("target_A") > 0.0) summary["radius_for_target"] = radius_for_target(b, c.num("target_A"));
    io::write_json(c.file(name + ".json"), summary);
    branches.push_back(summary);
  }
  io::write_text(c.file("tail_law.csv"), law.str());
  c.results["branches"] = branches;
  c.resolution["ode"] = {{"rtol", 1e-8}, {"atol", 1e-12}, {"tail_nodes", 4001}};
  c.out << "nonradiative: " << alphas.size() << " branches\n";
  return kOk;
}

int cmd_charnum(Ctx& c) {
  const RadialState u = io::read_state_csv(fs::path(required_path(c, "u")));
  const RadialState v = c.str("v").empty() ? RadialState::zero(u.grid, u.t) : io::read_state_csv(fs::path(c.str("v")));
  const auto w = c.list("window");
  if (!w.empty() && w.size() != 2) throw ConfigError("window needs two numbers r1,r2");
  const auto cn = characteristic_number(u, v, w.empty() ? std::nullopt : std::optional(std::pair{w[0], w[1]}));
  json j{{"alpha_fit", cn.alpha_fit}, {"alpha_int", cn.alpha_int}, {"agreement", cn.agreement},
         {"fit_residual", cn.fit_residual}, {"tail_bound", cn.tail_bound}, {"reliable", cn.reliable}};
  io::write_json(c.file("charnum.json"), j);
  c.grid_resolution(u.grid);
  c.results = j;
  c.out << "charnum: alpha_fit = " << cn.alpha_fit << ", alpha_int = " << cn.alpha_int << "\n";
  return kOk;
}

json history_json(const std::vector<IterationRecord>& h) {
  json a = json::array();
  for (const auto& r : h) a.push_back({{"iteration", r.iteration}, {"change", r.profile_change_l2}, {"ratio", r.ratio}});
  return a;
}

int cmd_construct_primary(Ctx& c) {
  const Nonlinearity F = make_F(c);
  RadiationProfile vL = io::read_profile_csv(fs::path(required_path(c, "profile"))).G;
  vL *= c.num("scale");
  ConstructOptions o;
  o.h = c.num("h");
  o.probe_time = c.num("probe_time");
  o.r_max = c.num("r_max");
  o.theta = c.num("theta");
  o.max_iter = static_cast<int>(c.integer("max_iter"));
  o.tol = c.num("tol");
  o.delta = c.num("delta");
  const auto r = construct_primary(vL, F, c.num("R"), o);
  io::write_state_csv(c.file("state.csv"), r.state);
  io::write_history_csv(c.file("history.csv"), r.history);
  io::write_profile_csv(c.file("correction.csv"), r.G);
  c.grid_resolution(r.state.grid);
  c.resolution["dt"] = r.state.grid.h();
  c.resolution["probe_times"] = {-r.probe_time, r.probe_time};
  c.results = {{"y_norm_vL", r.y_norm_vL},
               {"difference_norm", r.difference_norm},
               {"fixed_point_residual", r.fixed_point_residual},
               {"contraction_ratio", r.contraction_ratio},
               {"iterations", r.history.size()},
               {"history", history_json(r.history)},
               {"delta_note", "smallness threshold is an empirical setting, not the existence constant"}};
  c.out << "construct primary: " << r.history.size() << " iterations, ||(u0,u1)-(v0,v1)|| = " << r.difference_norm
        << "\n";
  return kOk;
}

int cmd_construct_alpha(Ctx& c) {
  const Nonlinearity F = make_F(c);
  RadialState base = c.str("base").empty()
                         ? RadialState::zero(RadialGrid::with_spacing(0.0, c.num("r_max"), c.num("h")))
                         : io::read_state_csv(fs::path(c.str("base")));
  AlphaOptions o;
  o.probe_time = c.num("probe_time");
  o.theta = c.num("theta");
  o.max_iter = static_cast<int>(c.integer("max_iter"));
  o.tol = c.num("tol");
  o.n_factor = c.num("n_factor");
  o.c = c.num("c");
  o.tail_threshold = c.num("tail_threshold");
  const double alpha = c.num("alpha");
  const auto r = construct_alpha({base, c.num("base_R")}, F, alpha, o);
  io::write_state_csv(c.file("state.csv"), r.state);
  io::write_history_csv(c.file("history.csv"), r.history);
  io::write_profile_csv(c.file("correction.csv"), r.G);
  const auto cn = characteristic_number(r.state, base);
  c.grid_resolution(base.grid);
  c.resolution["dt"] = base.grid.h();
  c.resolution["probe_times"] = {-r.probe_time, r.probe_time};
  c.results = {{"N", r.N},
               {"R_N", r.R_N},
               {"channel_tail", r.channel_tail},
               {"fixed_point_residual", r.fixed_point_residual},
               {"contraction_ratio", r.contraction_ratio},
               {"iterations", r.history.size()},
               {"history", history_json(r.history)},
               {"alpha_fit", cn.alpha_fit},
               {"alpha_int", cn.alpha_int},
               {"note", "n_factor, c and tail_threshold are numeric surrogates, not the existence constants"}};
  c.out << "construct alpha: N = " << r.N << ", alpha_fit = " << cn.alpha_fit << "\n";
  return kOk;
}

int cmd_scatter(Ctx& c) {
  const Nonlinearity F = make_F(c);
  const double T = c.num("T");
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  RadialState data = RadialState::zero(RadialGrid(0.0, 1.0, 2));
  if (c.str("data") == "bump") {
    const double r_max = c.num("r_max") > 0.0 ? c.num("r_max") : T + c.num("center") + c.num("width") + 10.0;
    data = bump_data(RadialGrid::with_spacing(0.0, r_max, c.num("h")), c.num("amplitude"), c.num("center"),
                     c.num("width"));
  } else if (c.str("data") == "state") {
    data = io::read_state_csv(fs::path(required_path(c, "input")));
  } else {
    throw ConfigError("data must be bump|state");
  }
  const RadialGrid& g = data.grid;
  EvolveOptions o;
  o.store_every = c.integer("store_every") > 0 ? static_cast<std::size_t>(c.integer("store_every"))
                                               : static_cast<std::size_t>(std::max(1.0, std::round(0.25 / g.h())));
  const double R = c.num("R");
  const Trajectory tr = R > 0.0 ? evolve_exterior(data, F, R, T, g.h(), o) : evolve(data, F, T, g.h(), o);
  ScatterOptions so;
  so.y_fraction_tol = c.num("y_fraction_tol");
  so.residual_tol = c.num("residual_tol");
  so.residual_floor = c.num("residual_floor");
  so.checkpoints = static_cast<int>(c.integer("checkpoints"));
  const ScatterVerdict v = scattering_verdict(tr, R, so);
  c.grid_resolution(g);
  c.resolution["dt"] = g.h();
  c.resolution["frame_dt"] = tr.dt;
  if (v.kind == VerdictKind::Blowup) {
    io::write_json(c.file("scatter.json"), {{"verdict", to_string(v.kind)}, {"reason", v.reason}});
    c.results["verdict"] = to_string(v.kind);
    c.out << "scatter-experiment: blowup (" << v.reason << ")\n";
    if (!c.flag("expect_blowup")) throw NumericalError("scatter-experiment: " + v.reason);
    return kOk;
  }
  const auto est = extract_profile(tr, Direction::Positive, R > 0.0 ? std::optional<double>(R) : std::nullopt);
  io::write_profile_csv(c.file("profile.csv"), est.G, tr.back().t);
  const Trajectory free = free_wave_through_final(tr);
  const auto cn = characteristic_number(tr.states.front(), free.states.front());
  io::write_json(c.file("scatter.json"), io::scatter_report(v, cn, "profile.csv"));
  std::ostringstream csv;
  csv << "t,residual\n";
  for (std::size_t i = 0; i < v.residual.values.size(); ++i) {
    csv << io::num(v.residual.times[i]) << ',' << io::num(v.residual.values[i]) << '\n';
  }
  io::write_text(c.file("residual.csv"), csv.str());
  std::vector<double> probes;
  for (int k = so.checkpoints; k >= 1; --k) probes.push_back(T / std::ldexp(1.0, k));
  c.resolution["probe_times"] = probes;
  c.results["verdict"] = to_string(v.kind);
  c.results["last_window_fraction"] = v.last_window_fraction;
  c.out << "scatter-experiment: " << to_string(v.kind) << "\n";
  return kOk;
}

int cmd_verify(Ctx& c, const std::string& suite) {
  const auto seed = static_cast<std::uint64_t>(c.integer("seed"));
  const int count = static_cast<int>(c.integer("count"));
  if (count < 2) throw ConfigError("count must be at least 2");
  std::vector<CheckRow> rows;
  auto add = [&rows](std::vector<CheckRow> r) { rows.insert(rows.end(), r.begin(), r.end()); };
  if (suite == "isometry" || suite == "all") add(verify_isometry(seed, count));
  if (suite == "conservation" || suite == "all") add(verify_conservation(seed));
  if (suite == "decay" || suite == "all") add(verify_decay(seed, count));
  std::ostringstream csv;
  csv << "suite,name,value,threshold,pass,detail\n";
  int failed = 0;
  for (const auto& r : rows) {
    csv << r.suite << ",\"" << r.name << "\"," << io::num(r.value) << ',' << io::num(r.threshold) << ','
        << (r.pass ? "pass" : "fail") << ",\"" << r.detail << "\"\n";
    c.out << (r.pass ? "PASS  " : "FAIL  ") << r.suite << ": " << r.name << " = " << r.value << " (threshold "
          << r.threshold << ")\n";
    failed += r.pass ? 0 : 1;
  }
  io::write_text(c.file("verify.csv"), csv.str());
  c.results["checks"] = rows.size();
  c.results["failed"] = failed;
  if (failed > 0) throw VerifyFailed(std::to_string(failed) + " check(s) failed");
  return kOk;
}

void write_manifest(const Ctx& c, const std::string& status) {
  json m{{"command", c.command},
         {"config", c.cfg},
         {"timestamp", utc_timestamp()},
         {"status", status},
         {"outputs", c.outputs},
         {"resolution", c.resolution},
         {"results", c.results}};
  io::write_json(c.out_dir / "manifest.json", m);
}

}  // namespace

std::vector<std::string> commands() {
  std::vector<std::string> out;
  for (const auto& [k, v] : schemas()) out.push_back(k);
  return out;
}

json defaults(const std::string& command) {
  const auto it = schemas().find(command);
  if (it == schemas().end()) throw ContractError("unknown command '" + command + "'");
  return it->second;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exterior solutions of radial semilinear wave equations", "exterior-wave-lab"};
  app.require_subcommand(1);
  std::string config_path;
  std::map<std::string, CLI::App*> leaves;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& full, const std::string& help) {
    CLI::App* s = parent->add_subcommand(name, help);
    s->add_option("--config", config_path, "JSON configuration file");
    s->allow_extras();
    leaves[full] = s;
    return s;
  };
  leaf(&app, "evolve", "evolve", "nonlinear evolution (whole space or exterior)");
  CLI::App* profile = app.add_subcommand("profile", "radiation profiles");
  profile->require_subcommand(1);
  leaf(profile, "extract", "profile extract", "profile of a stored trajectory");
  leaf(profile, "synthesize", "profile synthesize", "Cauchy data of a profile");
  leaf(&app, "norms", "norms", "space-time norms of a stored trajectory");
  leaf(&app, "nonradiative", "nonradiative", "non-radiative branches and tail laws");
  leaf(&app, "charnum", "charnum", "characteristic number of two states");
  CLI::App* construct = app.add_subcommand("construct", "fixed-point constructions");
  construct->require_subcommand(1);
  leaf(construct, "primary", "construct primary", "solution equivalent to a small free wave");
  leaf(construct, "alpha", "construct alpha", "member with a given characteristic number");
  leaf(&app, "scatter-experiment", "scatter-experiment", "long run plus scattering verdict");
  CLI::App* verify = app.add_subcommand("verify", "property suites");
  verify->require_subcommand(1);
  for (const char* s : {"decay", "isometry", "conservation", "all"}) leaf(verify, s, std::string("verify ") + s, "suite");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  std::string command;
  for (const auto& [name, sub] : leaves) {
    if (sub->parsed()) command = name;
  }
  if (command.empty()) {
    err << "error: no command given\n";
    return kConfigError;
  }

  Ctx ctx{command, json::object(), fs::path("out"), json::object(), json::object(), {}, out};
  try {
    ctx.cfg = effective_config(command, config_path, leaves[command]->remaining());
    ctx.out_dir = fs::path(ctx.cfg.at("out").get<std::string>());
    fs::create_directories(ctx.out_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  int code = kOk;
  std::string status = "ok";
  try {
    if (command == "evolve") code = cmd_evolve(ctx);
    else if (command == "profile extract") code = cmd_profile_extract(ctx);
    else if (command == "profile synthesize") code = cmd_profile_synthesize(ctx);
    else if (command == "norms") code = cmd_norms(ctx);
    else if (command == "nonradiative") code = cmd_nonradiative(ctx);
    else if (command == "charnum") code = cmd_charnum(ctx);
    else if (command == "construct primary") code = cmd_construct_primary(ctx);
    else if (command == "construct alpha") code = cmd_construct_alpha(ctx);
    else if (command == "scatter-experiment") code = cmd_scatter(ctx);
    else code = cmd_verify(ctx, command.substr(std::string("verify ").size()));
  } catch (const VerifyFailed& e) {
    err << "verify: " << e.what() << "\n";
    code = kVerifyFailed;
    status = "verify failed";
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    code = kNumericalError;
    status = std::string("numerical failure: ") + e.what();
  } catch (const ContractError& e) {
    err << "error: " << e.what() << "\n";
    code = kConfigError;
    status = std::string("config error: ") + e.what();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = kConfigError;
    status = std::string("error: ") + e.what();
  }
  try {
    write_manifest(ctx, status);
  } catch (const std::exception& e) {
    err << "error: cannot write manifest: " << e.what() << "\n";
    if (code == kOk) code = kConfigError;
  }
  return code;
}

}  // namespace ewl::cli
