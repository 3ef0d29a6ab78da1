#pragma once

#include <iosfwd>

#include "blochmca/config.hpp"

namespace blochmca {

/// Process exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitNotConverged = 2 };

/// Slack added to three standard errors when judging DP/MC agreement.
inline constexpr double kMcAllowance = 0.01;

/// Writes value.csv, policy.csv, report.json and config.json into config.out.
int cmd_solve(const RunConfig& config, std::ostream& log);

/// Writes comparison.csv, crossings.json, report.json and config.json.
int cmd_compare(const RunConfig& config, std::ostream& log);

/// Solves the configured strategy inline, simulates its policy from every
/// start point and writes mc.csv, report.json and config.json.
int cmd_simulate(const RunConfig& config, std::ostream& log);

/// Full front end: argument parsing, config-file merging and dispatch.
/// Precedence is flags > --config file > built-in defaults.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Renders a number the way every CSV column does (12 significant digits).
std::string format_number(double v);

} // namespace blochmca
