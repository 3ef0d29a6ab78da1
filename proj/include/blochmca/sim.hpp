#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "blochmca/chain.hpp"
#include "blochmca/model.hpp"
#include "blochmca/solver.hpp"

namespace blochmca {

struct SimConfig {
    double dt = 1e-4;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 42;
    double t_max = 100.0;
    unsigned workers = 1;
};

/// Throws ParamError naming the offending field.
void validate(const SimConfig& config);

/// Absorbing endpoints of the simulated interval.
struct Targets {
    Angle lo = 0.0;
    Angle hi = 0.0;
};

struct PathResult {
    bool hit = false;
    double tau = 0.0; ///< hitting time, or t_max when truncated
    double discounted_cost = 0.0;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_truncated = 0;
    std::size_t n_paths = 0;
};

using PolicyLookup = std::function<ControlAction(Angle)>;

/// Piecewise-constant feedback from a grid policy: the action of the nearest
/// node, with target nodes deferring to their interior neighbour.
class NearestNodePolicy {
public:
    NearestNodePolicy(Grid grid, Policy policy);

    ControlAction operator()(Angle theta) const;

private:
    Grid grid_;
    Policy policy_;
};

/// Euler-Maruyama step theta + drift dt + diffusion dW.
Angle step(Angle theta, const ControlAction& action, double dt, double dW);

/// Simulates one path from theta0 using the Gaussian substream `path_index`
/// of config.seed. A boundary crossing inside a step is located by linear
/// interpolation of theta across that step.
PathResult run_path(Angle theta0, const PolicyLookup& policy, const Targets& targets,
                    const ModelParams& params, const SimConfig& config, std::uint64_t path_index);

/// Mean and standard error of the discounted cost over config.n_paths paths.
/// Aggregation runs in path-index order, so the result is bitwise identical
/// for any worker count.
McEstimate estimate_cost(Angle theta0, const PolicyLookup& policy, const Targets& targets,
                         const ModelParams& params, const SimConfig& config);

} // namespace blochmca
