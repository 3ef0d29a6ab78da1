#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "blochmca/chain.hpp"
#include "blochmca/model.hpp"

namespace blochmca {

/// Discounted cost-to-go per grid node; target nodes hold exactly 0.
struct ValueFunction {
    std::vector<double> values;
};

/// Minimising action per grid node. Target nodes carry a zero action that is
/// never applied.
struct Policy {
    std::vector<ControlAction> actions;
};

/// Finite candidate controls searched at every interior node.
struct ControlSet {
    std::vector<double> alphas;
    std::vector<double> gammas;
    /// Adds the drift-nulling alpha = 2 gamma sin(2x) for each listed gamma
    /// when it is admissible at node x.
    bool include_kink = true;

    /// alpha in {-Omega, 0, Omega}, gamma in {0, Gamma}, plus the kink. The
    /// per-node objective is piecewise affine in (alpha, gamma) with a single
    /// kink along b = 0, so this set contains a minimiser whenever
    /// 2 Gamma <= Omega.
    static ControlSet dynamic(const ModelParams& params);
    static ControlSet fixed_measurement(const ModelParams& params);
    static ControlSet pure_rotation(const ModelParams& params);
    /// Uniform n_alpha x n_gamma grid over the admissible box (both >= 2).
    static ControlSet dense(const ModelParams& params, std::size_t n_alpha, std::size_t n_gamma);
};

/// Throws ParamError("alphas"/"gammas") on empty lists or out-of-bound entries.
void validate(const ControlSet& controls, const ModelParams& params);

/// Candidates at node x in tie-break order: smaller |alpha|, then smaller
/// alpha, then smaller gamma. Duplicates removed.
std::vector<ControlAction> candidates_at(Angle x, const ControlSet& controls,
                                         const ModelParams& params);

enum class SweepMethod {
    /// Plain simultaneous fixed-point iteration phi <- xi(phi).
    jacobi,
    /// Each sweep's argmin policy is evaluated exactly (a tridiagonal solve)
    /// before the next sweep. Same fixed point as `jacobi`, far fewer sweeps
    /// when the interpolation interval is small.
    policy_evaluation,
};

std::string_view to_string(SweepMethod method);

struct SolverSettings {
    double threshold = 1e-9;
    std::size_t max_iters = 200000;
    SweepMethod method = SweepMethod::policy_evaluation;
    unsigned workers = 1;
};

struct SolveReport {
    std::size_t iterations = 0;
    double final_residual = 0.0; ///< sup-norm change on the last sweep
    bool converged = false;
    double contraction_modulus = 0.0; ///< max over interior nodes of 1/(1 + beta dt)
    /// Bound on the sup-norm distance of the returned values to the fixed
    /// point: kappa / (1 - kappa) * final_residual.
    double error_bound = 0.0;
};

struct Solution {
    ValueFunction value;
    Policy policy;
    SolveReport report;
};

/// Discretised dynamic-programming operator of the controlled chain on a
/// fixed grid and control set. All transition weights are tabulated at
/// construction; applying the operator touches only those tables.
class BellmanOperator {
public:
    BellmanOperator(const Grid& grid, const ModelParams& params, const ControlSet& controls);

    std::size_t size() const noexcept { return n_; }

    /// One simultaneous sweep out = xi(phi). `choice[i]` receives the index of
    /// the minimising candidate at node i (0 at targets). Returns the sup-norm
    /// of out - phi. Results do not depend on `workers`.
    double apply(std::span<const double> phi, std::span<double> out,
                 std::span<std::uint32_t> choice, unsigned workers = 1) const;

    /// Exact discounted cost of following the given candidate choice forever.
    std::vector<double> evaluate(std::span<const std::uint32_t> choice) const;

    double contraction_modulus() const noexcept { return kappa_; }

    /// Candidate `k` at node i, in tie-break order.
    const ControlAction& action(std::size_t node, std::uint32_t k) const;
    std::size_t candidate_count(std::size_t node) const;

    Policy policy(std::span<const std::uint32_t> choice) const;

private:
    std::size_t n_;
    std::vector<std::size_t> offsets_; // candidate range per node
    std::vector<ControlAction> actions_;
    std::vector<double> w_plus_;
    std::vector<double> w_minus_;
    std::vector<double> w_stay_;
    std::vector<double> w_leave_; // 1 - w_stay_, computed without cancellation
    std::vector<double> cost_;
    double kappa_ = 0.0;
};

/// One application of the discretised HJB operator with argmin policy.
std::pair<ValueFunction, Policy> bellman_apply(const ValueFunction& phi, const Grid& grid,
                                               const ModelParams& params,
                                               const ControlSet& controls);

/// Iterates the operator from phi = 0 until the sup-norm change of a sweep is
/// at most settings.threshold or settings.max_iters sweeps have run. Returns
/// the last sweep's values and argmin policy either way.
Solution value_iterate(const Grid& grid, const ModelParams& params, const ControlSet& controls,
                       const SolverSettings& settings = {});

/// Piecewise-linear interpolation of nodal values, clamped to the grid.
double interpolate_value(const Grid& grid, const ValueFunction& phi, Angle theta);

enum class Strategy { pure_rotation, fixed_measurement, dynamic };

std::string_view to_string(Strategy strategy);
/// Throws ParamError("strategy") on unknown names.
Strategy parse_strategy(std::string_view name);

/// Restricts `configured` to the strategy: pure rotation uses {-Omega, Omega}
/// x {0}; fixed measurement keeps the configured alphas with gamma = Gamma;
/// dynamic uses `configured` unchanged.
ControlSet restrict_controls(Strategy strategy, const ModelParams& params,
                             const ControlSet& configured);

Solution evaluate_baseline(Strategy strategy, const Grid& grid, const ModelParams& params,
                           const ControlSet& configured, const SolverSettings& settings = {});

/// Discounted cost of rotating at full speed toward the nearer endpoint:
/// (1 - exp(-beta d / Omega)) / beta with d the distance to that endpoint.
double rotation_cost_closed_form(Angle theta0, Angle lo, Angle hi, const ModelParams& params);

struct NodeFeature {
    Angle theta = 0.0;
    int alpha_sign = 0;
    double alpha_fraction = 0.0; ///< |alpha| / Omega
    double gamma_fraction = 0.0; ///< gamma / Gamma, 0 when Gamma = 0
};

/// Closed run of consecutive interior nodes [first, last].
struct NodeInterval {
    std::size_t first = 0;
    std::size_t last = 0;
    Angle lo = 0.0;
    Angle hi = 0.0;
};

struct PolicyFeatures {
    std::vector<NodeFeature> nodes; ///< interior nodes only
    std::vector<NodeInterval> gamma_off;  ///< maximal runs with gamma = 0
    std::vector<NodeInterval> gamma_full; ///< maximal runs with gamma = Gamma (Gamma > 0)
};

PolicyFeatures extract_policy_features(const Policy& policy, const Grid& grid,
                                       const ModelParams& params);

} // namespace blochmca
