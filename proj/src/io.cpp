#include "ewl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ewl/error.hpp"

namespace ewl::io {

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ContractError("cannot read " + path.string());
  return is;
}

std::map<std::string, std::string> parse_meta(const std::string& line) {
  if (line.rfind("# ", 0) != 0) throw ContractError("csv: expected a '# key=value,...' metadata line");
  std::map<std::string, std::string> meta;
  std::stringstream ss(line.substr(2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ContractError("csv: malformed metadata item '" + item + "'");
    meta[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return meta;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(s, &pos);
    if (pos != s.size()) throw ContractError("");
    return x;
  } catch (const std::exception&) {
    throw ContractError("csv: cannot parse " + what + " '" + s + "'");
  }
}

double meta_value(const std::map<std::string, std::string>& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw ContractError("csv: metadata lacks '" + key + "'");
  return to_double(it->second, key);
}

std::vector<std::vector<double>> read_rows(std::istream& is, const std::string& header, std::size_t cols) {
  std::string line;
  if (!std::getline(is, line) || line != header) throw ContractError("csv: expected header '" + header + "'");
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(to_double(cell, "value"));
    if (row.size() != cols) throw ContractError("csv: row with " + std::to_string(row.size()) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

void check_uniform(const std::vector<std::vector<double>>& rows, double a, double b, const char* what) {
  if (rows.size() < 2) throw ContractError(std::string(what) + ": need at least two rows");
  const double h = (b - a) / static_cast<double>(rows.size() - 1);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double expect = a + static_cast<double>(k) * h;
    if (std::abs(rows[k][0] - expect) > 1e-9 * (1.0 + std::abs(expect))) {
      throw ContractError(std::string(what) + ": first column is not the uniform grid of the metadata");
    }
  }
}

}  // namespace

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_profile_csv(std::ostream& os, const RadiationProfile& G, double t) {
  os << "# n=" << G.n() << ",s_min=" << num(G.s_min()) << ",s_max=" << num(G.s_max()) << ",t=" << num(t) << "\n";
  os << "s,G\n";
  for (std::size_t k = 0; k < G.n(); ++k) os << num(G.s(k)) << ',' << num(G[k]) << '\n';
}

void write_profile_csv(const fs::path& path, const RadiationProfile& G, double t) {
  auto os = open_out(path);
  write_profile_csv(os, G, t);
}

ProfileFile read_profile_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ContractError("profile csv: empty input");
  const auto meta = parse_meta(line);
  const double a = meta_value(meta, "s_min"), b = meta_value(meta, "s_max");
  const auto rows = read_rows(is, "s,G", 2);
  if (rows.size() != static_cast<std::size_t>(meta_value(meta, "n"))) {
    throw ContractError("profile csv: row count differs from n");
  }
  check_uniform(rows, a, b, "profile csv");
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r[1]);
  return {RadiationProfile(a, b, std::move(v)), meta_value(meta, "t")};
}

ProfileFile read_profile_csv(const fs::path& path) {
  auto is = open_in(path);
  return read_profile_csv(is);
}

void write_state_csv(std::ostream& os, const RadialState& s) {
  const RadialGrid& g = s.grid;
  os << "# n=" << g.n() << ",r_min=" << num(g.r_min()) << ",r_max=" << num(g.r_max()) << ",t=" << num(s.t) << "\n";
  os << "r,u,ut\n";
  for (std::size_t i = 0; i < g.n(); ++i) os << num(g.r(i)) << ',' << num(s.u[i]) << ',' << num(s.ut[i]) << '\n';
}

void write_state_csv(const fs::path& path, const RadialState& s) {
  auto os = open_out(path);
  write_state_csv(os, s);
}

RadialState read_state_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ContractError("state csv: empty input");
  const auto meta = parse_meta(line);
  const double a = meta_value(meta, "r_min"), b = meta_value(meta, "r_max");
  const auto rows = read_rows(is, "r,u,ut", 3);
  if (rows.size() != static_cast<std::size_t>(meta_value(meta, "n"))) {
    throw ContractError("state csv: row count differs from n");
  }
  check_uniform(rows, a, b, "state csv");
  RadialState s = RadialState::zero(RadialGrid(a, b, rows.size()), meta_value(meta, "t"));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.u[i] = rows[i][1];
    s.ut[i] = rows[i][2];
  }
  s.validate();
  return s;
}

RadialState read_state_csv(const fs::path& path) {
  auto is = open_in(path);
  return read_state_csv(is);
}

void write_trajectory(const fs::path& dir, const Trajectory& traj) {
  traj.validate();
  fs::create_directories(dir);
  json frames = json::array();
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%05zu.csv", n);
    write_state_csv(dir / name, traj.states[n]);
    frames.push_back({{"file", name}, {"t", traj.states[n].t}});
  }
  const RadialGrid& g = traj.grid();
  json j{{"grid", {{"n", g.n()}, {"r_min", g.r_min()}, {"r_max", g.r_max()}, {"h", g.h()}}},
         {"dt", traj.dt},
         {"scheme", traj.scheme},
         {"source", traj.source_descriptor},
         {"cone_origin", traj.cone_origin ? json(*traj.cone_origin) : json(nullptr)},
         {"frames", frames}};
  if (traj.blowup) {
    j["blowup"] = {{"t", traj.blowup->t}, {"r", traj.blowup->r}, {"authoritative", traj.blowup->authoritative}};
  } else {
    j["blowup"] = nullptr;
  }
  write_json(dir / "trajectory.json", j);
}

Trajectory read_trajectory(const fs::path& dir) {
  auto is = open_in(dir / "trajectory.json");
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ContractError(std::string("trajectory.json: ") + e.what());
  }
  Trajectory traj;
  traj.dt = j.at("dt").get<double>();
  traj.scheme = j.at("scheme").get<std::string>();
  traj.source_descriptor = j.at("source").get<std::string>();
  if (!j.at("cone_origin").is_null()) traj.cone_origin = j["cone_origin"].get<double>();
  if (!j.at("blowup").is_null()) {
    traj.blowup = BlowupReport{j["blowup"].at("t").get<double>(), j["blowup"].at("r").get<double>(),
                               j["blowup"].at("authoritative").get<bool>()};
  }
  for (const auto& f : j.at("frames")) traj.states.push_back(read_state_csv(dir / f.at("file").get<std::string>()));
  traj.validate();
  return traj;
}

void write_channel_csv(const fs::path& path, const ChannelNorms& c) {
  auto os = open_out(path);
  os << "k,b_k\n";
  for (std::size_t i = 0; i < c.b.size(); ++i) os << c.k_min + static_cast<int>(i) << ',' << num(c.b[i]) << '\n';
}

void write_region_table(const fs::path& path, const std::vector<RegionRow>& rows) {
  auto os = open_out(path);
  os << "region,value,error\n";
  for (const auto& r : rows) os << '"' << r.region << "\"," << num(r.value) << ',' << num(r.error) << '\n';
}

void write_history_csv(const fs::path& path, const std::vector<IterationRecord>& history) {
  auto os = open_out(path);
  os << "iteration,profile_change_l2,probe_discrepancy\n";
  for (const auto& h : history) {
    os << h.iteration << ',' << num(h.profile_change_l2) << ',' << num(h.probe_discrepancy) << '\n';
  }
}

void write_branch_csv(const fs::path& path, const NonradiativeBranch& b) {
  auto os = open_out(path);
  os << "r,w,w_r,u,u_r\n";
  auto row = [&os](double r, double w, double wr) {
    const double u = w / r;
    os << num(r) << ',' << num(w) << ',' << num(wr) << ',' << num(u) << ',' << num((wr - u) / r) << '\n';
  };
  const TailSolution& t = b.tail;
  for (std::size_t i = t.r.size(); i-- > 1;) row(t.r[i], t.w[i], t.w_r[i]);
  for (std::size_t i = 0; i < b.r.size(); ++i) {
    if (b.r[i] > 0.0) row(b.r[i], b.w[i], b.w_r[i]);
  }
}

json branch_summary(const NonradiativeBranch& b) {
  return {{"alpha", b.alpha},
          {"R_alpha", b.R_alpha},
          {"classification", to_string(b.classification)},
          {"reason", to_string(b.reason)},
          {"kappa", b.classification == BranchClass::Global ? json(b.central_slope) : json(nullptr)},
          {"R_start", b.R_start},
          {"R_far", b.tail.R_far},
          {"trust_radius", b.trust_radius},
          {"tail_iterations", b.tail.iterations},
          {"tail_residual", b.tail.residual},
          {"tail_contraction_ratio", b.tail.contraction_ratio},
          {"tail_truncation_bound", b.tail.truncation_bound}};
}

json residual_json(const ResidualCurve& c) {
  json a = json::array();
  for (std::size_t i = 0; i < c.values.size(); ++i) a.push_back({{"t", c.times[i]}, {"residual", c.values[i]}});
  return a;
}

json scatter_report(const ScatterVerdict& v, const CharacteristicNumber& c, const std::string& profile_csv_path) {
  return {{"verdict", to_string(v.kind)},
          {"reason", v.reason},
          {"alpha_fit", c.alpha_fit},
          {"alpha_int", c.alpha_int},
          {"agreement", c.agreement},
          {"last_window_fraction", v.last_window_fraction},
          {"initial_energy_sq", v.initial_energy_sq},
          {"residual_curve", residual_json(v.residual)},
          {"profile_csv_path", profile_csv_path}};
}

void write_text(const fs::path& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace ewl::io
