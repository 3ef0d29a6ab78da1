#include "blochmca/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "blochmca/parallel.hpp"

namespace blochmca {

ControlSet ControlSet::dynamic(const ModelParams& params) {
    return {{-params.omega, 0.0, params.omega}, {0.0, params.gamma_max}, true};
}

ControlSet ControlSet::fixed_measurement(const ModelParams& params) {
    return {{-params.omega, 0.0, params.omega}, {params.gamma_max}, true};
}

ControlSet ControlSet::pure_rotation(const ModelParams& params) {
    return {{-params.omega, params.omega}, {0.0}, false};
}

ControlSet ControlSet::dense(const ModelParams& params, std::size_t n_alpha, std::size_t n_gamma) {
    if (n_alpha < 2 || n_gamma < 2) {
        throw ParamError("controls", "dense control grid needs at least 2 points per axis");
    }
    ControlSet set;
    set.include_kink = false;
    for (std::size_t i = 0; i < n_alpha; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n_alpha - 1);
        set.alphas.push_back(i + 1 == n_alpha ? params.omega : -params.omega + 2.0 * params.omega * t);
    }
    for (std::size_t j = 0; j < n_gamma; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(n_gamma - 1);
        set.gammas.push_back(j + 1 == n_gamma ? params.gamma_max : params.gamma_max * t);
    }
    return set;
}

void validate(const ControlSet& controls, const ModelParams& params) {
    if (controls.alphas.empty()) throw ParamError("alphas", "candidate list is empty");
    if (controls.gammas.empty()) throw ParamError("gammas", "candidate list is empty");
    for (double a : controls.alphas) {
        if (!std::isfinite(a) || std::abs(a) > params.omega) {
            throw ParamError("alphas", "candidate " + std::to_string(a) + " outside [-omega, omega]");
        }
    }
    for (double g : controls.gammas) {
        if (!std::isfinite(g) || g < 0.0 || g > params.gamma_max) {
            throw ParamError("gammas", "candidate " + std::to_string(g) + " outside [0, gamma_max]");
        }
    }
}

std::vector<ControlAction> candidates_at(Angle x, const ControlSet& controls,
                                         const ModelParams& params) {
    std::vector<ControlAction> out;
    out.reserve(controls.alphas.size() * controls.gammas.size() + controls.gammas.size());
    for (double a : controls.alphas) {
        for (double g : controls.gammas) out.push_back({a, g});
    }
    if (controls.include_kink) {
        const double s2 = std::sin(2.0 * x);
        for (double g : controls.gammas) {
            const ControlAction kink{2.0 * g * s2, g};
            if (admissible(kink, params)) out.push_back(kink);
        }
    }
    const auto order = [](const ControlAction& l, const ControlAction& r) {
        const double al = std::abs(l.alpha);
        const double ar = std::abs(r.alpha);
        if (al != ar) return al < ar;
        if (l.alpha != r.alpha) return l.alpha < r.alpha;
        return l.gamma < r.gamma;
    };
    std::sort(out.begin(), out.end(), order);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string_view to_string(SweepMethod method) {
    switch (method) {
    case SweepMethod::jacobi: return "jacobi";
    case SweepMethod::policy_evaluation: return "policy_evaluation";
    }
    return "unknown";
}

BellmanOperator::BellmanOperator(const Grid& grid, const ModelParams& params,
                                 const ControlSet& controls)
    : n_(grid.size()) {
    validate(params);
    validate(controls, params);
    const double h = grid.h();
    offsets_.assign(n_ + 1, 0);
    for (std::size_t i = 0; i < n_; ++i) {
        offsets_[i] = actions_.size();
        if (grid.is_target(i)) continue;
        const Angle x = grid[i];
        for (const ControlAction& a : candidates_at(x, controls, params)) {
            const LocalTransitions t = local_transitions(x, a, params, h);
            const double disc = 1.0 / (1.0 + params.beta * t.dt);
            actions_.push_back(a);
            w_plus_.push_back(t.p_plus * disc);
            w_minus_.push_back(t.p_minus * disc);
            w_stay_.push_back(t.p_stay * disc);
            w_leave_.push_back((t.p_plus + t.p_minus + params.beta * t.dt) * disc);
            cost_.push_back(t.dt * disc);
            kappa_ = std::max(kappa_, disc);
        }
    }
    offsets_[n_] = actions_.size();
}

const ControlAction& BellmanOperator::action(std::size_t node, std::uint32_t k) const {
    return actions_.at(offsets_.at(node) + k);
}

std::size_t BellmanOperator::candidate_count(std::size_t node) const {
    return offsets_.at(node + 1) - offsets_.at(node);
}

double BellmanOperator::apply(std::span<const double> phi, std::span<double> out,
                              std::span<std::uint32_t> choice, unsigned workers) const {
    if (phi.size() != n_ || out.size() != n_ || choice.size() != n_) {
        throw std::invalid_argument("BellmanOperator::apply: size mismatch");
    }
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, n_));
    std::vector<double> chunk_residual(chunks, 0.0);

    detail::parallel_for(n_, workers, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
        double residual = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t lo = offsets_[i];
            const std::size_t hi = offsets_[i + 1];
            if (lo == hi) {
                out[i] = 0.0;
                choice[i] = 0;
                residual = std::max(residual, std::abs(phi[i]));
                continue;
            }
            double best = std::numeric_limits<double>::infinity();
            std::size_t arg = lo;
            for (std::size_t k = lo; k < hi; ++k) {
                const double v = w_plus_[k] * phi[i + 1] + w_minus_[k] * phi[i - 1] +
                                 w_stay_[k] * phi[i] + cost_[k];
                if (v < best) {
                    best = v;
                    arg = k;
                }
            }
            out[i] = best;
            choice[i] = static_cast<std::uint32_t>(arg - lo);
            residual = std::max(residual, std::abs(best - phi[i]));
        }
        chunk_residual[chunk] = residual;
    });
    double residual = 0.0;
    for (double r : chunk_residual) residual = std::max(residual, r);
    return residual;
}

std::vector<double> BellmanOperator::evaluate(std::span<const std::uint32_t> choice) const {
    if (choice.size() != n_) throw std::invalid_argument("BellmanOperator::evaluate: size mismatch");
    // Tridiagonal system on interior nodes 1..n-2:
    //   -w_minus phi[i-1] + w_leave phi[i] - w_plus phi[i+1] = cost,
    // with phi = 0 at both targets. Strictly diagonally dominant, so the
    // Thomas sweep is stable without pivoting.
    std::vector<double> phi(n_, 0.0);
    std::vector<double> upper(n_, 0.0);
    std::vector<double> rhs(n_, 0.0);
    for (std::size_t i = 1; i + 1 < n_; ++i) {
        const std::size_t k = offsets_[i] + choice[i];
        const double sub = i > 1 ? -w_minus_[k] : 0.0;
        const double m = w_leave_[k] - sub * upper[i - 1];
        upper[i] = -w_plus_[k] / m;
        rhs[i] = (cost_[k] - sub * rhs[i - 1]) / m;
    }
    for (std::size_t i = n_ - 2; i >= 1; --i) {
        phi[i] = rhs[i] - upper[i] * phi[i + 1];
    }
    return phi;
}

Policy BellmanOperator::policy(std::span<const std::uint32_t> choice) const {
    Policy p;
    p.actions.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        if (offsets_[i] != offsets_[i + 1]) p.actions[i] = actions_[offsets_[i] + choice[i]];
    }
    return p;
}

std::pair<ValueFunction, Policy> bellman_apply(const ValueFunction& phi, const Grid& grid,
                                               const ModelParams& params,
                                               const ControlSet& controls) {
    const BellmanOperator op(grid, params, controls);
    ValueFunction out{std::vector<double>(grid.size(), 0.0)};
    std::vector<std::uint32_t> choice(grid.size(), 0);
    op.apply(phi.values, out.values, choice);
    return {std::move(out), op.policy(choice)};
}

Solution value_iterate(const Grid& grid, const ModelParams& params, const ControlSet& controls,
                       const SolverSettings& settings) {
    if (!(settings.threshold > 0.0)) throw ParamError("threshold", "must be > 0");
    if (settings.max_iters == 0) throw ParamError("max_iters", "must be >= 1");

    const BellmanOperator op(grid, params, controls);
    const std::size_t n = grid.size();
    std::vector<double> phi(n, 0.0);
    std::vector<double> next(n, 0.0);
    std::vector<std::uint32_t> choice(n, 0);

    SolveReport report;
    report.contraction_modulus = op.contraction_modulus();
    for (std::size_t it = 1; it <= settings.max_iters; ++it) {
        report.iterations = it;
        report.final_residual = op.apply(phi, next, choice, settings.workers);
        if (report.final_residual <= settings.threshold) {
            report.converged = true;
            break;
        }
        if (settings.method == SweepMethod::policy_evaluation) {
            phi = op.evaluate(choice);
        } else {
            std::swap(phi, next);
        }
    }
    if (!report.converged && settings.method == SweepMethod::jacobi) {
        // Loop exited after a swap; the latest sweep lives in phi.
        std::swap(phi, next);
    }
    const double kappa = report.contraction_modulus;
    report.error_bound = kappa < 1.0 ? kappa / (1.0 - kappa) * report.final_residual
                                     : std::numeric_limits<double>::infinity();
    return {ValueFunction{std::move(next)}, op.policy(choice), report};
}

double interpolate_value(const Grid& grid, const ValueFunction& phi, Angle theta) {
    const auto& v = phi.values;
    if (v.size() != grid.size()) throw std::invalid_argument("interpolate_value: size mismatch");
    const double s = (theta - grid.lo()) / grid.h();
    if (!(s > 0.0)) return v.front();
    const auto i = static_cast<std::size_t>(std::floor(s));
    if (i + 1 >= v.size()) return v.back();
    const double w = s - static_cast<double>(i);
    return (1.0 - w) * v[i] + w * v[i + 1];
}

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
    case Strategy::pure_rotation: return "rotation";
    case Strategy::fixed_measurement: return "fixed";
    case Strategy::dynamic: return "dynamic";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    if (name == "rotation" || name == "pure_rotation") return Strategy::pure_rotation;
    if (name == "fixed" || name == "fixed_measurement") return Strategy::fixed_measurement;
    if (name == "dynamic") return Strategy::dynamic;
    throw ParamError("strategy", "expected dynamic, fixed or rotation, got '" + std::string(name) + "'");
}

ControlSet restrict_controls(Strategy strategy, const ModelParams& params,
                             const ControlSet& configured) {
    switch (strategy) {
    case Strategy::pure_rotation: return ControlSet::pure_rotation(params);
    case Strategy::fixed_measurement: return {configured.alphas, {params.gamma_max}, configured.include_kink};
    case Strategy::dynamic: return configured;
    }
    return configured;
}

Solution evaluate_baseline(Strategy strategy, const Grid& grid, const ModelParams& params,
                           const ControlSet& configured, const SolverSettings& settings) {
    return value_iterate(grid, params, restrict_controls(strategy, params, configured), settings);
}

double rotation_cost_closed_form(Angle theta0, Angle lo, Angle hi, const ModelParams& params) {
    const double d = std::max(0.0, std::min(theta0 - lo, hi - theta0));
    return -std::expm1(-params.beta * d / params.omega) / params.beta;
}

PolicyFeatures extract_policy_features(const Policy& policy, const Grid& grid,
                                       const ModelParams& params) {
    if (policy.actions.size() != grid.size()) {
        throw std::invalid_argument("extract_policy_features: policy/grid size mismatch");
    }
    PolicyFeatures f;
    const auto push_run = [&](std::vector<NodeInterval>& runs, std::size_t i) {
        if (!runs.empty() && runs.back().last + 1 == i) {
            runs.back().last = i;
            runs.back().hi = grid[i];
        } else {
            runs.push_back({i, i, grid[i], grid[i]});
        }
    };
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const ControlAction& a = policy.actions[i];
        NodeFeature nf;
        nf.theta = grid[i];
        nf.alpha_sign = (a.alpha > 0.0) - (a.alpha < 0.0);
        nf.alpha_fraction = std::abs(a.alpha) / params.omega;
        nf.gamma_fraction = params.gamma_max > 0.0 ? a.gamma / params.gamma_max : 0.0;
        f.nodes.push_back(nf);
        if (a.gamma == 0.0) push_run(f.gamma_off, i);
        if (params.gamma_max > 0.0 && a.gamma == params.gamma_max) push_run(f.gamma_full, i);
    }
    return f;
}

} // namespace blochmca
