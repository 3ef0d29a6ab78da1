#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "blochmca/model.hpp"
#include "blochmca/scenarios.hpp"
#include "blochmca/sim.hpp"
#include "blochmca/solver.hpp"

namespace blochmca {

/// Everything a CLI run needs. Unset optionals resolve to scenario defaults.
struct RunConfig {
    ScenarioKind scenario = ScenarioKind::eigenstate;
    ModelParams params;
    std::optional<std::size_t> nodes;
    std::optional<Angle> lo; ///< custom scenario only
    std::optional<Angle> hi; ///< custom scenario only
    SolverSettings solver;
    std::optional<std::vector<double>> alphas;
    std::optional<std::vector<double>> gammas;
    bool kink = true;
    Strategy strategy = Strategy::dynamic;
    SimConfig sim;
    std::optional<std::vector<Angle>> starts;
    std::string out = ".";
};

using Setting = std::pair<std::string, std::string>;

/// Sets one field from its textual value. Keys use snake_case or the CLI's
/// dashed spelling (gamma_max / gamma-max). Throws ParamError(key) on unknown
/// keys or malformed values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Reads a flat config file: either `key = value` lines ('#' starts a
/// comment) or a JSON object such as the one written by to_json().
std::vector<Setting> read_config_file(const std::filesystem::path& path);

/// Resolved configuration as a JSON document whose keys feed apply_setting.
std::string to_json(const RunConfig& config);

Scenario scenario_of(const RunConfig& config);
ControlSet controls_of(const RunConfig& config);
std::vector<Angle> starts_of(const RunConfig& config);

/// Re-validates every module invariant the configuration touches.
void validate(const RunConfig& config);

/// Default Monte Carlo start points for a scenario.
std::vector<Angle> probe_starts(const Scenario& scenario);

} // namespace blochmca
