#include "blochmca/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace blochmca {

namespace {

std::string normalise_key(std::string_view key) {
    std::string k(key);
    for (char& c : k) {
        if (c == '-') c = '_';
    }
    if (k == "n_paths") return "paths";
    return k;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ParamError(key, "not a number: '" + std::string(text) + "'");
    }
    return v;
}

template <class Int>
Int parse_int(const std::string& key, std::string_view text) {
    text = trim(text);
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ParamError(key, "not a non-negative integer: '" + std::string(text) + "'");
    }
    return v;
}

std::vector<double> parse_list(const std::string& key, std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '[' && text.back() == ']') {
        text = text.substr(1, text.size() - 2);
    }
    std::vector<double> out;
    while (!trim(text).empty()) {
        const auto comma = text.find(',');
        out.push_back(parse_double(key, text.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (out.empty()) throw ParamError(key, "empty list");
    return out;
}

bool parse_bool(const std::string& key, std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ParamError(key, "not a boolean: '" + std::string(text) + "'");
}

SweepMethod parse_method(const std::string& key, std::string_view text) {
    text = trim(text);
    if (text == "jacobi") return SweepMethod::jacobi;
    if (text == "policy_evaluation" || text == "policy-evaluation") return SweepMethod::policy_evaluation;
    throw ParamError(key, "expected jacobi or policy_evaluation");
}

} // namespace

void apply_setting(RunConfig& c, std::string_view raw_key, std::string_view value) {
    const std::string key = normalise_key(trim(raw_key));
    if (key == "scenario") {
        c.scenario = parse_scenario_kind(trim(value));
    } else if (key == "omega") {
        c.params.omega = parse_double(key, value);
    } else if (key == "gamma_max") {
        c.params.gamma_max = parse_double(key, value);
    } else if (key == "beta") {
        c.params.beta = parse_double(key, value);
    } else if (key == "nodes") {
        c.nodes = parse_int<std::size_t>(key, value);
    } else if (key == "lo") {
        c.lo = parse_double(key, value);
    } else if (key == "hi") {
        c.hi = parse_double(key, value);
    } else if (key == "threshold") {
        c.solver.threshold = parse_double(key, value);
    } else if (key == "max_iters") {
        c.solver.max_iters = parse_int<std::size_t>(key, value);
    } else if (key == "method") {
        c.solver.method = parse_method(key, value);
    } else if (key == "workers") {
        c.solver.workers = parse_int<unsigned>(key, value);
        c.sim.workers = c.solver.workers;
    } else if (key == "alphas") {
        c.alphas = parse_list(key, value);
    } else if (key == "gammas") {
        c.gammas = parse_list(key, value);
    } else if (key == "kink") {
        c.kink = parse_bool(key, value);
    } else if (key == "strategy") {
        c.strategy = parse_strategy(trim(value));
    } else if (key == "dt") {
        c.sim.dt = parse_double(key, value);
    } else if (key == "paths") {
        c.sim.n_paths = parse_int<std::size_t>(key, value);
    } else if (key == "seed") {
        c.sim.seed = parse_int<std::uint64_t>(key, value);
    } else if (key == "t_max") {
        c.sim.t_max = parse_double(key, value);
    } else if (key == "starts") {
        c.starts = parse_list(key, value);
    } else if (key == "out") {
        c.out = std::string(trim(value));
    } else {
        throw ParamError(key, "unknown setting");
    }
}

std::vector<Setting> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParamError("config", "cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::vector<Setting> out;
    const std::string_view body = trim(text);
    if (!body.empty() && body.front() == '{') {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw ParamError("config", std::string("invalid JSON: ") + e.what());
        }
        for (const auto& [key, v] : doc.items()) {
            std::string value;
            if (v.is_string()) {
                value = v.get<std::string>();
            } else if (v.is_array()) {
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (i) value += ',';
                    value += v[i].dump();
                }
            } else {
                value = v.dump();
            }
            out.emplace_back(key, std::move(value));
        }
        return out;
    }

    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        std::string_view l = line;
        if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
        l = trim(l);
        if (l.empty()) continue;
        const auto eq = l.find('=');
        if (eq == std::string_view::npos) {
            throw ParamError("config", "line " + std::to_string(lineno) + ": expected key = value");
        }
        out.emplace_back(std::string(trim(l.substr(0, eq))), std::string(trim(l.substr(eq + 1))));
    }
    return out;
}

Scenario scenario_of(const RunConfig& c) {
    switch (c.scenario) {
    case ScenarioKind::eigenstate:
        return eigenstate_scenario(c.params, c.nodes.value_or(kEigenstateNodes));
    case ScenarioKind::non_eigenstate:
        return non_eigenstate_scenario(c.params, c.nodes.value_or(kNonEigenstateNodes));
    case ScenarioKind::custom:
        return custom_scenario(c.lo.value_or(-std::numbers::pi), c.hi.value_or(std::numbers::pi),
                               c.params, c.nodes.value_or(kEigenstateNodes));
    }
    throw ParamError("scenario", "unknown scenario");
}

ControlSet controls_of(const RunConfig& c) {
    ControlSet set = ControlSet::dynamic(c.params);
    if (c.alphas) set.alphas = *c.alphas;
    if (c.gammas) set.gammas = *c.gammas;
    set.include_kink = c.kink;
    return set;
}

std::vector<Angle> starts_of(const RunConfig& c) {
    return c.starts ? *c.starts : probe_starts(scenario_of(c));
}

void validate(const RunConfig& c) {
    if (c.scenario != ScenarioKind::custom && (c.lo || c.hi)) {
        throw ParamError("lo", "lo/hi apply to the custom scenario only");
    }
    const Scenario s = scenario_of(c);
    validate(s);
    validate(controls_of(c), c.params);
    if (!(c.solver.threshold > 0.0) || !std::isfinite(c.solver.threshold)) {
        throw ParamError("threshold", "must be finite and > 0");
    }
    if (c.solver.max_iters == 0) throw ParamError("max_iters", "must be >= 1");
    if (c.solver.workers == 0) throw ParamError("workers", "must be >= 1");
    validate(c.sim);
    for (Angle t : starts_of(c)) {
        if (!(t > s.lo && t < s.hi)) throw ParamError("starts", "start points must lie inside the domain");
    }
    if (c.out.empty()) throw ParamError("out", "output directory is empty");
}

std::vector<Angle> probe_starts(const Scenario& s) {
    using std::numbers::pi;
    switch (s.kind) {
    case ScenarioKind::eigenstate:
        return {0.0, pi / 4, -pi / 4, pi / 2 - 0.1, pi / 2 + 0.1, -pi / 2 + 0.1, -pi / 2 - 0.1};
    case ScenarioKind::non_eigenstate:
        return {pi / 2, pi / 4, 3 * pi / 4, -pi / 4, 5 * pi / 4};
    case ScenarioKind::custom: {
        const double w = s.hi - s.lo;
        return {s.lo + 0.25 * w, s.lo + 0.5 * w, s.lo + 0.75 * w};
    }
    }
    return {};
}

std::string to_json(const RunConfig& c) {
    const Scenario s = scenario_of(c);
    const ControlSet controls = controls_of(c);
    nlohmann::ordered_json j;
    j["scenario"] = std::string(to_string(c.scenario));
    j["omega"] = c.params.omega;
    j["gamma_max"] = c.params.gamma_max;
    j["beta"] = c.params.beta;
    j["nodes"] = s.nodes;
    if (c.scenario == ScenarioKind::custom) {
        j["lo"] = s.lo;
        j["hi"] = s.hi;
    }
    j["threshold"] = c.solver.threshold;
    j["max_iters"] = c.solver.max_iters;
    j["method"] = std::string(to_string(c.solver.method));
    j["workers"] = c.solver.workers;
    j["alphas"] = controls.alphas;
    j["gammas"] = controls.gammas;
    j["kink"] = controls.include_kink;
    j["strategy"] = std::string(to_string(c.strategy));
    j["dt"] = c.sim.dt;
    j["paths"] = c.sim.n_paths;
    j["seed"] = c.sim.seed;
    j["t_max"] = c.sim.t_max;
    j["starts"] = starts_of(c);
    j["out"] = c.out;
    return j.dump(2) + "\n";
}

} // namespace blochmca
