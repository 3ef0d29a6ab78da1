#include "blochmca/model.hpp"

#include <cmath>

namespace blochmca {

void validate(const ModelParams& params) {
    if (!std::isfinite(params.omega) || params.omega <= 0.0) {
        throw ParamError("omega", "must be finite and > 0");
    }
    if (!std::isfinite(params.gamma_max) || params.gamma_max < 0.0) {
        throw ParamError("gamma_max", "must be finite and >= 0");
    }
    if (!std::isfinite(params.beta) || params.beta <= 0.0) {
        throw ParamError("beta", "must be finite and > 0");
    }
}

bool admissible(const ControlAction& action, const ModelParams& params) {
    return std::isfinite(action.alpha) && std::isfinite(action.gamma) &&
           std::abs(action.alpha) <= params.omega && action.gamma >= 0.0 &&
           action.gamma <= params.gamma_max;
}

void validate(const ControlAction& action, const ModelParams& params) {
    if (!std::isfinite(action.alpha) || std::abs(action.alpha) > params.omega) {
        throw ParamError("alpha", "must satisfy |alpha| <= omega");
    }
    if (!std::isfinite(action.gamma) || action.gamma < 0.0 ||
        action.gamma > params.gamma_max) {
        throw ParamError("gamma", "must lie in [0, gamma_max]");
    }
}

double drift(Angle theta, const ControlAction& action) {
    return action.alpha - 2.0 * action.gamma * std::sin(2.0 * theta);
}

double diffusion(Angle theta, const ControlAction& action) {
    return 2.0 * std::sqrt(2.0 * action.gamma) * std::sin(theta);
}

} // namespace blochmca
