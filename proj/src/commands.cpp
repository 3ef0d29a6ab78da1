#include "blochmca/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

namespace blochmca {

namespace fs = std::filesystem;

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

fs::path prepare_out(const RunConfig& config) {
    fs::path dir(config.out);
    fs::create_directories(dir);
    return dir;
}

nlohmann::ordered_json report_json(const SolveReport& r, SweepMethod method) {
    nlohmann::ordered_json j;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["final_residual"] = r.final_residual;
    j["contraction_modulus"] = r.contraction_modulus;
    j["error_bound"] = r.error_bound;
    j["method"] = std::string(to_string(method));
    return j;
}

nlohmann::ordered_json intervals_json(const std::vector<NodeInterval>& runs) {
    auto arr = nlohmann::ordered_json::array();
    for (const NodeInterval& r : runs) arr.push_back({r.lo, r.hi});
    return arr;
}

void log_report(std::ostream& log, std::string_view label, const SolveReport& r) {
    log << label << ": " << (r.converged ? "converged" : "NOT converged") << " after "
        << r.iterations << " sweeps, residual " << format_number(r.final_residual)
        << ", error bound " << format_number(r.error_bound) << "\n";
}

} // namespace

int cmd_solve(const RunConfig& config, std::ostream& log) {
    validate(config);
    const Scenario scenario = scenario_of(config);
    const Grid grid = scenario.grid();
    const Solution sol =
        evaluate_baseline(config.strategy, grid, config.params, controls_of(config), config.solver);

    const fs::path dir = prepare_out(config);
    std::string value_csv = "theta,value\n";
    std::string policy_csv = "theta,alpha,gamma\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        value_csv += format_number(grid[i]) + "," + format_number(sol.value.values[i]) + "\n";
        if (grid.is_target(i)) continue;
        const ControlAction& a = sol.policy.actions[i];
        policy_csv += format_number(grid[i]) + "," + format_number(a.alpha) + "," +
                      format_number(a.gamma) + "\n";
    }
    write_file(dir / "value.csv", value_csv);
    write_file(dir / "policy.csv", policy_csv);

    nlohmann::ordered_json report;
    report["scenario"] = std::string(to_string(scenario.kind));
    report["strategy"] = std::string(to_string(config.strategy));
    report["nodes"] = grid.size();
    report["h"] = grid.h();
    report["solve"] = report_json(sol.report, config.solver.method);
    write_file(dir / "report.json", report.dump(2) + "\n");
    write_file(dir / "config.json", to_json(config));

    log_report(log, to_string(config.strategy), sol.report);
    return sol.report.converged ? kExitOk : kExitNotConverged;
}

int cmd_compare(const RunConfig& config, std::ostream& log) {
    validate(config);
    const Scenario scenario = scenario_of(config);
    const ScenarioResult result = run_scenario(scenario, controls_of(config), config.solver);

    const fs::path dir = prepare_out(config);
    std::string csv = "theta,cost_dynamic,cost_fixed,cost_rotation,alpha_opt,gamma_opt\n";
    for (const ComparisonRow& r : result.table.rows) {
        csv += format_number(r.theta) + "," + format_number(r.cost_dynamic) + "," +
               format_number(r.cost_fixed) + "," + format_number(r.cost_rotation) + "," +
               format_number(r.alpha_opt) + "," + format_number(r.gamma_opt) + "\n";
    }
    write_file(dir / "comparison.csv", csv);

    const Crossings c = crossings(result.table, config.params);
    nlohmann::ordered_json cj;
    cj["localization"] = c.localization;
    cj["gamma_switches"] = c.gamma_switches;
    cj["alpha_sign_switches"] = c.alpha_sign_switches;
    cj["fixed_vs_rotation"] = c.fixed_vs_rotation;
    cj["gamma_off"] = intervals_json(c.gamma_off);
    cj["gamma_full"] = intervals_json(c.gamma_full);
    write_file(dir / "crossings.json", cj.dump(2) + "\n");

    nlohmann::ordered_json report;
    report["scenario"] = std::string(to_string(scenario.kind));
    report["nodes"] = result.grid.size();
    report["h"] = result.grid.h();
    report["dynamic"] = report_json(result.dynamic.report, config.solver.method);
    report["fixed"] = report_json(result.fixed.report, config.solver.method);
    report["rotation"] = report_json(result.rotation.report, config.solver.method);
    write_file(dir / "report.json", report.dump(2) + "\n");
    write_file(dir / "config.json", to_json(config));

    log_report(log, "dynamic", result.dynamic.report);
    log_report(log, "fixed", result.fixed.report);
    log_report(log, "rotation", result.rotation.report);
    return result.converged() ? kExitOk : kExitNotConverged;
}

int cmd_simulate(const RunConfig& config, std::ostream& log) {
    validate(config);
    const Scenario scenario = scenario_of(config);
    const Grid grid = scenario.grid();
    const Solution sol =
        evaluate_baseline(config.strategy, grid, config.params, controls_of(config), config.solver);
    const NearestNodePolicy feedback(grid, sol.policy);
    const PolicyLookup lookup = [&feedback](Angle theta) { return feedback(theta); };

    std::string csv = "theta0,mean,std_error,n_truncated,dp_value,consistent_flag\n";
    for (Angle theta0 : starts_of(config)) {
        const McEstimate est =
            estimate_cost(theta0, lookup, scenario.targets(), config.params, config.sim);
        const double dp = interpolate_value(grid, sol.value, theta0);
        const bool consistent = std::abs(est.mean - dp) <= 3.0 * est.std_error + kMcAllowance;
        csv += format_number(theta0) + "," + format_number(est.mean) + "," +
               format_number(est.std_error) + "," + std::to_string(est.n_truncated) + "," +
               format_number(dp) + "," + (consistent ? "true" : "false") + "\n";
        log << "theta0 " << format_number(theta0) << ": mc " << format_number(est.mean) << " +- "
            << format_number(est.std_error) << ", dp " << format_number(dp)
            << (consistent ? "" : "  (inconsistent)") << "\n";
    }

    const fs::path dir = prepare_out(config);
    write_file(dir / "mc.csv", csv);
    nlohmann::ordered_json report;
    report["scenario"] = std::string(to_string(scenario.kind));
    report["strategy"] = std::string(to_string(config.strategy));
    report["solve"] = report_json(sol.report, config.solver.method);
    write_file(dir / "report.json", report.dump(2) + "\n");
    write_file(dir / "config.json", to_json(config));
    return sol.report.converged ? kExitOk : kExitNotConverged;
}

namespace {

struct Flag {
    const char* name;
    const char* key;
    const char* help;
};

constexpr Flag kFlags[] = {
    {"--scenario", "scenario", "eigenstate | non_eigenstate | custom"},
    {"--omega", "omega", "max angular speed"},
    {"--gamma-max", "gamma_max", "max measurement strength"},
    {"--beta", "beta", "discount rate"},
    {"--nodes", "nodes", "grid node count"},
    {"--lo", "lo", "custom scenario lower endpoint"},
    {"--hi", "hi", "custom scenario upper endpoint"},
    {"--threshold", "threshold", "sup-norm stopping threshold"},
    {"--max-iters", "max_iters", "maximum number of sweeps"},
    {"--method", "method", "policy_evaluation | jacobi"},
    {"--workers", "workers", "worker threads"},
    {"--alphas", "alphas", "comma-separated alpha candidates"},
    {"--gammas", "gammas", "comma-separated gamma candidates"},
    {"--kink", "kink", "add the drift-nulling alpha candidate (true|false)"},
    {"--strategy", "strategy", "dynamic | fixed | rotation (solve, simulate)"},
    {"--dt", "dt", "simulation time step"},
    {"--paths", "paths", "Monte Carlo path count"},
    {"--seed", "seed", "master RNG seed"},
    {"--t-max", "t_max", "simulation truncation horizon"},
    {"--starts", "starts", "comma-separated start angles (simulate)"},
    {"--out", "out", "output directory"},
};

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Minimum discounted hitting-time control of a measured qubit"};
    app.require_subcommand(1);

    std::map<std::string, std::string> values;
    std::string config_path;
    std::vector<CLI::App*> subs;
    for (const char* name : {"solve", "compare", "simulate"}) {
        CLI::App* sub = app.add_subcommand(name);
        for (const Flag& f : kFlags) sub->add_option(f.name, values[f.key], f.help);
        sub->add_option("--config", config_path, "key=value or JSON config file");
        subs.push_back(sub);
    }
    subs[0]->description("solve the HJB chain for one strategy");
    subs[1]->description("compare dynamic, fixed-measurement and pure-rotation strategies");
    subs[2]->description("Monte Carlo check of a solved policy");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    CLI::App* active = nullptr;
    for (CLI::App* s : subs) {
        if (s->parsed()) active = s;
    }

    RunConfig config;
    try {
        if (!config_path.empty()) {
            for (const auto& [k, v] : read_config_file(config_path)) apply_setting(config, k, v);
        }
        for (const Flag& f : kFlags) {
            if (active->count(f.name) > 0) apply_setting(config, f.key, values[f.key]);
        }
        validate(config);
    } catch (const ParamError& e) {
        err << "config error [" << e.field() << "]: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        const std::string name = active->get_name();
        if (name == "solve") return cmd_solve(config, out);
        if (name == "compare") return cmd_compare(config, out);
        return cmd_simulate(config, out);
    } catch (const ParamError& e) {
        err << "config error [" << e.field() << "]: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

} // namespace blochmca
