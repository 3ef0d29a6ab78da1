#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace blochmca {

/// Angular coordinate on the Bloch circle in radians. Not wrapped: each
/// scenario works on a plain interval whose endpoints are the targets.
using Angle = double;

/// Thrown when a parameter or configuration value violates its invariant.
/// `field()` names the offending field so front ends can report it.
class ParamError : public std::invalid_argument {
public:
    ParamError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Control bounds and discounting for the reduced qubit model.
struct ModelParams {
    double omega = 5.0;     ///< max angular speed, |alpha| <= omega
    double gamma_max = 1.0; ///< max measurement strength, 0 <= gamma <= gamma_max
    double beta = 0.1;      ///< discount rate of the hitting-time cost

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// One admissible control pair: angular velocity and measurement strength.
struct ControlAction {
    double alpha = 0.0;
    double gamma = 0.0;

    friend bool operator==(const ControlAction&, const ControlAction&) = default;
};

/// Throws ParamError naming the first violated field.
void validate(const ModelParams& params);

bool admissible(const ControlAction& action, const ModelParams& params);

/// Throws ParamError("alpha"/"gamma") if the action is outside the bounds.
void validate(const ControlAction& action, const ModelParams& params);

/// Drift of the measured qubit angle: alpha - 2 gamma sin(2 theta).
double drift(Angle theta, const ControlAction& action);

/// Diffusion coefficient of the measured qubit angle: 2 sqrt(2 gamma) sin(theta).
/// The backaction vanishes at the measurement eigenstates theta = 0, +-pi.
double diffusion(Angle theta, const ControlAction& action);

} // namespace blochmca
