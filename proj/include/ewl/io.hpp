#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ewl/family_construct.hpp"
#include "ewl/field_core.hpp"
#include "ewl/linear_radiation.hpp"
#include "ewl/nonradiative_ode.hpp"
#include "ewl/scatter_analysis.hpp"
#include "ewl/spacetime_norms.hpp"

namespace ewl::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Full-precision decimal text of x (17 significant digits, '.' separator).
std::string num(double x);

/// "# key=value,..." metadata line followed by "s,G" rows.
void write_profile_csv(std::ostream& os, const RadiationProfile& G, double t = 0.0);
void write_profile_csv(const fs::path& path, const RadiationProfile& G, double t = 0.0);
struct ProfileFile {
  RadiationProfile G;
  double t = 0.0;
};
/// Throws ContractError on malformed input, including a non-uniform s column.
ProfileFile read_profile_csv(std::istream& is);
ProfileFile read_profile_csv(const fs::path& path);

/// "# n=..,r_min=..,r_max=..,t=.." then "r,u,ut".
void write_state_csv(std::ostream& os, const RadialState& s);
void write_state_csv(const fs::path& path, const RadialState& s);
RadialState read_state_csv(std::istream& is);
RadialState read_state_csv(const fs::path& path);

/// frame_00000.csv ... plus trajectory.json (grid, dt, scheme, source, cone_origin, blow-up).
void write_trajectory(const fs::path& dir, const Trajectory& traj);
Trajectory read_trajectory(const fs::path& dir);

void write_channel_csv(const fs::path& path, const ChannelNorms& c);
struct RegionRow {
  std::string region;
  double value = 0.0;
  double error = 0.0;
};
void write_region_table(const fs::path& path, const std::vector<RegionRow>& rows);
void write_history_csv(const fs::path& path, const std::vector<IterationRecord>& history);

/// r, w, w_r, u, u_r over the tail (r > R_start) and the inward samples,
/// r decreasing.
void write_branch_csv(const fs::path& path, const NonradiativeBranch& b);
json branch_summary(const NonradiativeBranch& b);

json residual_json(const ResidualCurve& c);
/// {verdict, alpha_fit, alpha_int, agreement, residual_curve, profile_csv_path}
json scatter_report(const ScatterVerdict& v, const CharacteristicNumber& c, const std::string& profile_csv_path);

/// Writes text with LF endings; throws std::runtime_error if the file cannot be written.
void write_text(const fs::path& path, const std::string& text);
void write_json(const fs::path& path, const json& j);

}  // namespace ewl::io
