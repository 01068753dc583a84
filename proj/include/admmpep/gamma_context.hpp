#pragma once

namespace admmpep {

/// Dual step length parameter for the over-relaxed regime, gamma > 1, together
/// with quantities that appear throughout the closed forms.
struct GammaContext {
    double gamma;      ///< dual step length, strictly greater than 1
    double sqrt_term;  ///< sqrt(gamma^2 - 1)
    double phi;        ///< golden ratio (sqrt(5)+1)/2, the monotonicity threshold

    /// Throws std::invalid_argument unless gamma > 1.
    explicit GammaContext(double gamma_value);
};

/// Golden ratio (sqrt(5)+1)/2.
double golden_ratio();

}  // namespace admmpep
