#include "blochmca/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "blochmca/parallel.hpp"
#include "blochmca/rng.hpp"

namespace blochmca {

void validate(const SimConfig& config) {
    if (!std::isfinite(config.dt) || config.dt <= 0.0) throw ParamError("dt", "must be > 0");
    if (config.n_paths < 1) throw ParamError("paths", "must be >= 1");
    if (!std::isfinite(config.t_max) || config.t_max < config.dt) {
        throw ParamError("t_max", "must be finite and >= dt");
    }
}

NearestNodePolicy::NearestNodePolicy(Grid grid, Policy policy)
    : grid_(std::move(grid)), policy_(std::move(policy)) {
    if (policy_.actions.size() != grid_.size()) {
        throw std::invalid_argument("NearestNodePolicy: policy/grid size mismatch");
    }
}

ControlAction NearestNodePolicy::operator()(Angle theta) const {
    std::size_t i = grid_.nearest(theta);
    if (i == 0) i = 1;
    if (i + 1 == grid_.size()) i = grid_.size() - 2;
    return policy_.actions[i];
}

Angle step(Angle theta, const ControlAction& action, double dt, double dW) {
    return theta + drift(theta, action) * dt + diffusion(theta, action) * dW;
}

PathResult run_path(Angle theta0, const PolicyLookup& policy, const Targets& targets,
                    const ModelParams& params, const SimConfig& config, std::uint64_t path_index) {
    if (!(theta0 > targets.lo && theta0 < targets.hi)) {
        throw ParamError("theta0", "start must lie strictly inside the domain");
    }
    NormalStream normals(config.seed, path_index);
    const double sqrt_dt = std::sqrt(config.dt);
    const auto steps = static_cast<std::uint64_t>(std::ceil(config.t_max / config.dt));

    PathResult r;
    Angle theta = theta0;
    for (std::uint64_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * config.dt;
        const Angle next = step(theta, policy(theta), config.dt, sqrt_dt * normals.next());
        const bool below = next <= targets.lo;
        if (below || next >= targets.hi) {
            const Angle edge = below ? targets.lo : targets.hi;
            const double fraction = (edge - theta) / (next - theta);
            r.hit = true;
            r.tau = std::min(config.t_max, t + fraction * config.dt);
            r.discounted_cost = -std::expm1(-params.beta * r.tau) / params.beta;
            return r;
        }
        theta = next;
    }
    r.tau = config.t_max;
    r.discounted_cost = -std::expm1(-params.beta * config.t_max) / params.beta;
    return r;
}

McEstimate estimate_cost(Angle theta0, const PolicyLookup& policy, const Targets& targets,
                         const ModelParams& params, const SimConfig& config) {
    validate(params);
    validate(config);
    std::vector<PathResult> paths(config.n_paths);
    detail::parallel_for(config.n_paths, config.workers,
                         [&](std::size_t begin, std::size_t end, std::size_t) {
                             for (std::size_t p = begin; p < end; ++p) {
                                 paths[p] = run_path(theta0, policy, targets, params, config, p);
                             }
                         });

    McEstimate est;
    est.n_paths = config.n_paths;
    // Shifted by the first sample so identical samples give an exact mean and
    // a zero standard error.
    const double shift = paths.front().discounted_cost;
    double sum = 0.0;
    for (const PathResult& p : paths) {
        sum += p.discounted_cost - shift;
        if (!p.hit) ++est.n_truncated;
    }
    est.mean = shift + sum / static_cast<double>(paths.size());
    if (paths.size() > 1) {
        double ss = 0.0;
        for (const PathResult& p : paths) {
            const double d = p.discounted_cost - est.mean;
            ss += d * d;
        }
        const double n = static_cast<double>(paths.size());
        est.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return est;
}

} // namespace blochmca
