#include "blochmca/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace blochmca {

using std::numbers::pi;

std::string_view to_string(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::eigenstate: return "eigenstate";
    case ScenarioKind::non_eigenstate: return "non_eigenstate";
    case ScenarioKind::custom: return "custom";
    }
    return "unknown";
}

ScenarioKind parse_scenario_kind(std::string_view name) {
    if (name == "eigenstate") return ScenarioKind::eigenstate;
    if (name == "non_eigenstate" || name == "non-eigenstate") return ScenarioKind::non_eigenstate;
    if (name == "custom") return ScenarioKind::custom;
    throw ParamError("scenario",
                     "expected eigenstate, non_eigenstate or custom, got '" + std::string(name) + "'");
}

Scenario eigenstate_scenario(const ModelParams& params, std::size_t nodes) {
    return {ScenarioKind::eigenstate, -pi, pi, params, nodes};
}

Scenario non_eigenstate_scenario(const ModelParams& params, std::size_t nodes) {
    return {ScenarioKind::non_eigenstate, -pi / 2.0, 1.5 * pi, params, nodes};
}

Scenario custom_scenario(Angle lo, Angle hi, const ModelParams& params, std::size_t nodes) {
    return {ScenarioKind::custom, lo, hi, params, nodes};
}

void validate(const Scenario& scenario) {
    validate(scenario.params);
    if (!std::isfinite(scenario.lo) || !std::isfinite(scenario.hi) || !(scenario.hi > scenario.lo)) {
        throw ParamError("domain", "need finite lo < hi");
    }
    if (scenario.nodes < 3) throw ParamError("nodes", "need at least 3 grid nodes");
    if (scenario.kind == ScenarioKind::eigenstate && (scenario.lo != -pi || scenario.hi != pi)) {
        throw ParamError("domain", "eigenstate scenario is fixed to (-pi, pi)");
    }
    if (scenario.kind == ScenarioKind::non_eigenstate &&
        (scenario.lo != -pi / 2.0 || scenario.hi != 1.5 * pi)) {
        throw ParamError("domain", "non_eigenstate scenario is fixed to (-pi/2, 3pi/2)");
    }
}

ScenarioResult run_scenario(const Scenario& scenario, const ControlSet& configured,
                            const SolverSettings& settings) {
    validate(scenario);
    Grid grid = scenario.grid();
    const ModelParams& p = scenario.params;
    Solution dyn = evaluate_baseline(Strategy::dynamic, grid, p, configured, settings);
    Solution fix = evaluate_baseline(Strategy::fixed_measurement, grid, p, configured, settings);
    Solution rot = evaluate_baseline(Strategy::pure_rotation, grid, p, configured, settings);

    ComparisonTable table;
    table.rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        table.rows.push_back({grid[i], dyn.value.values[i], fix.value.values[i],
                              rot.value.values[i], dyn.policy.actions[i].alpha,
                              dyn.policy.actions[i].gamma});
    }
    return {std::move(grid), std::move(table), std::move(dyn), std::move(fix), std::move(rot)};
}

Crossings crossings(const ComparisonTable& table, const ModelParams& params, double tolerance) {
    const auto& rows = table.rows;
    if (rows.size() < 3) throw std::invalid_argument("crossings: table needs at least 3 rows");
    Crossings c;
    c.localization = 2.0 * (rows[1].theta - rows[0].theta);

    const auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
    const std::size_t last = rows.size() - 2; // last interior row

    for (std::size_t i = 1; i < last; ++i) {
        const ComparisonRow& a = rows[i];
        const ComparisonRow& b = rows[i + 1];
        const double mid = 0.5 * (a.theta + b.theta);
        if (a.gamma_opt != b.gamma_opt) c.gamma_switches.push_back(mid);
        if (sign(a.alpha_opt) != sign(b.alpha_opt)) c.alpha_sign_switches.push_back(mid);
    }

    // Sign changes of fixed - rotation, skipping rows tied within tolerance.
    std::size_t prev = 0;
    int prev_sign = 0;
    for (std::size_t i = 1; i <= last; ++i) {
        const double d = rows[i].cost_fixed - rows[i].cost_rotation;
        const int s = std::abs(d) <= tolerance ? 0 : sign(d);
        if (s == 0) continue;
        if (prev_sign != 0 && s != prev_sign) {
            const double dp = rows[prev].cost_fixed - rows[prev].cost_rotation;
            const double w = dp / (dp - d);
            c.fixed_vs_rotation.push_back(rows[prev].theta + w * (rows[i].theta - rows[prev].theta));
        }
        prev = i;
        prev_sign = s;
    }

    const auto push_run = [&](std::vector<NodeInterval>& runs, std::size_t i) {
        if (!runs.empty() && runs.back().last + 1 == i) {
            runs.back().last = i;
            runs.back().hi = rows[i].theta;
        } else {
            runs.push_back({i, i, rows[i].theta, rows[i].theta});
        }
    };
    for (std::size_t i = 1; i <= last; ++i) {
        if (rows[i].gamma_opt == 0.0) push_run(c.gamma_off, i);
        if (params.gamma_max > 0.0 && rows[i].gamma_opt == params.gamma_max) push_run(c.gamma_full, i);
    }
    return c;
}

} // namespace blochmca
