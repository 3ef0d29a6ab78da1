#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "blochmca/chain.hpp"
#include "blochmca/model.hpp"
#include "blochmca/sim.hpp"
#include "blochmca/solver.hpp"

namespace blochmca {

enum class ScenarioKind { eigenstate, non_eigenstate, custom };

std::string_view to_string(ScenarioKind kind);
/// Throws ParamError("scenario") on unknown names.
ScenarioKind parse_scenario_kind(std::string_view name);

inline constexpr std::size_t kEigenstateNodes = 1257;
inline constexpr std::size_t kNonEigenstateNodes = 1601;

/// A transfer problem: domain [lo, hi] with both endpoints as targets.
struct Scenario {
    ScenarioKind kind = ScenarioKind::eigenstate;
    Angle lo = 0.0;
    Angle hi = 0.0;
    ModelParams params;
    std::size_t nodes = kEigenstateNodes;

    Grid grid() const { return build_grid(lo, hi, nodes); }
    Targets targets() const { return {lo, hi}; }
};

/// Transfer between the measurement eigenstates: domain (-pi, pi).
Scenario eigenstate_scenario(const ModelParams& params = {}, std::size_t nodes = kEigenstateNodes);
/// Transfer between states orthogonal to the measurement axis: (-pi/2, 3pi/2).
Scenario non_eigenstate_scenario(const ModelParams& params = {},
                                 std::size_t nodes = kNonEigenstateNodes);
Scenario custom_scenario(Angle lo, Angle hi, const ModelParams& params, std::size_t nodes);

/// Throws ParamError if the scenario's domain, params or grid size is invalid.
void validate(const Scenario& scenario);

struct ComparisonRow {
    Angle theta = 0.0;
    double cost_dynamic = 0.0;
    double cost_fixed = 0.0;
    double cost_rotation = 0.0;
    double alpha_opt = 0.0;
    double gamma_opt = 0.0;
};

/// One row per grid node in node order.
struct ComparisonTable {
    std::vector<ComparisonRow> rows;
};

struct ScenarioResult {
    Grid grid;
    ComparisonTable table;
    Solution dynamic;
    Solution fixed;
    Solution rotation;

    bool converged() const {
        return dynamic.report.converged && fixed.report.converged && rotation.report.converged;
    }
};

/// Solves the dynamic, fixed-measurement and pure-rotation problems on the
/// scenario grid and tabulates them. Non-convergence is reported through the
/// solutions' reports; the table is produced regardless.
ScenarioResult run_scenario(const Scenario& scenario, const ControlSet& configured,
                            const SolverSettings& settings = {});

/// Switching points of the optimal policy and crossings of the fixed and
/// rotation cost curves. Every location is accurate to +-localization.
struct Crossings {
    double localization = 0.0; ///< 2h
    std::vector<Angle> gamma_switches;
    std::vector<Angle> alpha_sign_switches;
    std::vector<Angle> fixed_vs_rotation;
    std::vector<NodeInterval> gamma_off;
    std::vector<NodeInterval> gamma_full;
};

/// Cost differences within `tolerance` are treated as ties, not crossings.
Crossings crossings(const ComparisonTable& table, const ModelParams& params,
                    double tolerance = 1e-6);

} // namespace blochmca
