#pragma once

#include <cmath>

#include "duality/errors.hpp"

// Exponential time weights. The instantaneous weight is
//
//     h(t) = amp * exp(-gamma * t),
//
// and the tail weight is its integral up to the horizon,
//
//     H(t) = integral_t^T h(s) ds,
//
// so H(T) = 0 and H' = -h. Relative entropy arguments need gamma * H <= h
// pointwise on [0, T], which for this profile is equivalent to
// gamma * H(0) <= h(0), i.e. 1 - exp(-gamma T) <= 1: always true. The
// nontrivial requirement on gamma comes from the model (adapted gamma below
// dominates twice the most negative eigenvalue of the sharp field along the
// flow); validate() only rejects malformed profiles.

namespace duality {

struct WeightProfile {
    double gamma = 0.0;
    double amp = 1.0;
    double T = 1.0;

    WeightProfile() = default;
    WeightProfile(double gamma_, double amp_, double T_)
        : gamma(gamma_), amp(amp_), T(T_) {
        validate();
    }

    void validate() const {
        if (!(T > 0.0)) throw ConfigError("weights: horizon T must be positive");
        if (!(amp > 0.0)) throw ConfigError("weights: amp must be positive");
        if (gamma < 0.0) throw ConfigError("weights: gamma must be nonnegative");
        if (!std::isfinite(gamma) || !std::isfinite(amp) || !std::isfinite(T))
            throw ConfigError("weights: parameters must be finite");
    }

    double h(double t) const { return amp * std::exp(-gamma * t); }

    // H(t) = amp * (exp(-gamma t) - exp(-gamma T)) / gamma, with the gamma -> 0
    // limit amp * (T - t). Use the expm1 form near zero for accuracy.
    double H(double t) const {
        if (gamma == 0.0) return amp * (T - t);
        const double e = std::exp(-gamma * t);
        return amp / gamma * (e - std::exp(-gamma * T));
    }

    // gamma * H(t) - h(t); must be <= 0 on [0, T]. Exposed for tests.
    double slack(double t) const { return gamma * H(t) - h(t); }
};

}  // namespace duality
