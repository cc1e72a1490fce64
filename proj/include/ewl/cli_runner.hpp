#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace ewl::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3, kVerifyFailed = 4 };

/// Runs `exterior-wave-lab <command> [sub] [--config path] [--key value ...]`.
/// args excludes the program name. Data files go to the configured output
/// directory; a summary goes to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Default configuration of a command ("evolve", "profile extract", ...).
/// Throws ContractError for unknown commands.
nlohmann::json defaults(const std::string& command);

/// All command names accepted by run().
std::vector<std::string> commands();

}  // namespace ewl::cli
