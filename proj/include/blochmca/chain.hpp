#pragma once

#include <cstddef>
#include <vector>

#include "blochmca/model.hpp"

namespace blochmca {

/// Uniform mesh over [lo, hi]. Both endpoints are absorbing target nodes;
/// every other node is interior and carries a local transition law.
class Grid {
public:
    Grid(Angle lo, Angle hi, std::size_t n);

    Angle lo() const noexcept { return lo_; }
    Angle hi() const noexcept { return hi_; }
    double h() const noexcept { return h_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    Angle operator[](std::size_t i) const { return nodes_[i]; }
    const std::vector<Angle>& nodes() const noexcept { return nodes_; }

    bool is_target(std::size_t i) const noexcept { return i == 0 || i + 1 == nodes_.size(); }

    /// Index of the node closest to theta, clamped to the grid.
    std::size_t nearest(Angle theta) const noexcept;

private:
    Angle lo_;
    Angle hi_;
    double h_;
    std::vector<Angle> nodes_;
};

/// Throws ParamError if n < 3 or hi <= lo.
Grid build_grid(Angle lo, Angle hi, std::size_t n);

/// Grid from a mesh step; (hi - lo)/h must be an integer within 1e-9.
Grid build_grid_with_step(Angle lo, Angle hi, double h);

/// One-step law of the locally consistent chain at an interior node.
struct LocalTransitions {
    double p_plus = 0.0;
    double p_minus = 0.0;
    double p_stay = 0.0;
    double dt = 0.0; ///< interpolation interval attached to the step
};

/// Upper bound on |drift| over all admissible actions: Omega + 2 Gamma |sin 2x|.
double b_star(Angle x, const ModelParams& params);

/// Upper bound on diffusion^2 over all admissible actions: 8 Gamma sin^2 x.
double sigma_star_sq(Angle x, const ModelParams& params);

/// Interpolation interval h^2 / (sigma*^2 + h B*). Independent of the action.
double interpolation_interval(Angle x, const ModelParams& params, double h);

/// Kushner-Dupuis upwind transition law. Throws std::domain_error if the
/// normaliser sigma*^2 + h B* vanishes (impossible when omega > 0).
LocalTransitions local_transitions(Angle x, const ControlAction& action,
                                   const ModelParams& params, double h);

} // namespace blochmca
