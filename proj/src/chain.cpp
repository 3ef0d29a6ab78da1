#include "blochmca/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blochmca {

Grid::Grid(Angle lo, Angle hi, std::size_t n) : lo_(lo), hi_(hi), h_(0.0) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
        throw ParamError("domain", "need finite lo < hi");
    }
    if (n < 3) {
        throw ParamError("nodes", "need at least 3 grid nodes");
    }
    h_ = (hi - lo) / static_cast<double>(n - 1);
    nodes_.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        nodes_[i] = lo + static_cast<double>(i) * h_;
    }
    nodes_[n - 1] = hi;
}

std::size_t Grid::nearest(Angle theta) const noexcept {
    const double s = std::round((theta - lo_) / h_);
    if (!(s > 0.0)) return 0;
    const auto last = static_cast<double>(nodes_.size() - 1);
    return static_cast<std::size_t>(std::min(s, last));
}

Grid build_grid(Angle lo, Angle hi, std::size_t n) { return Grid(lo, hi, n); }

Grid build_grid_with_step(Angle lo, Angle hi, double h) {
    if (!std::isfinite(h) || h <= 0.0) {
        throw ParamError("h", "mesh step must be > 0");
    }
    const double cells = (hi - lo) / h;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 || rounded < 2.0) {
        throw ParamError("h", "(hi - lo)/h must be an integer >= 2");
    }
    return Grid(lo, hi, static_cast<std::size_t>(rounded) + 1);
}

double b_star(Angle x, const ModelParams& params) {
    return params.omega + 2.0 * params.gamma_max * std::abs(std::sin(2.0 * x));
}

double sigma_star_sq(Angle x, const ModelParams& params) {
    const double s = std::sin(x);
    return 8.0 * params.gamma_max * s * s;
}

double interpolation_interval(Angle x, const ModelParams& params, double h) {
    return h * h / (sigma_star_sq(x, params) + h * b_star(x, params));
}

LocalTransitions local_transitions(Angle x, const ControlAction& action,
                                   const ModelParams& params, double h) {
    const double sig_star_sq = sigma_star_sq(x, params);
    const double bound = b_star(x, params);
    const double denom = sig_star_sq + h * bound;
    if (!(denom > 0.0)) {
        throw std::domain_error("local_transitions: sigma*^2 + h B* vanishes");
    }
    const double b = drift(x, action);
    const double sig = diffusion(x, action);
    const double sig_sq = sig * sig;

    LocalTransitions t;
    t.p_plus = (0.5 * sig_sq + h * std::max(b, 0.0)) / denom;
    t.p_minus = (0.5 * sig_sq + h * std::max(-b, 0.0)) / denom;
    // Both dominances hold analytically; clamp the last-ulp rounding when the
    // action sits on the bound.
    t.p_stay = std::max(0.0, ((sig_star_sq - sig_sq) + h * bound - h * std::abs(b)) / denom);
    t.dt = h * h / denom;
    return t;
}

} // namespace blochmca
