#include "admmpep/gamma_context.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace admmpep {

double golden_ratio() { return (std::sqrt(5.0) + 1.0) / 2.0; }

GammaContext::GammaContext(double gamma_value)
    : gamma(gamma_value), sqrt_term(0.0), phi(golden_ratio()) {
    if (!(gamma_value > 1.0)) {
        throw std::invalid_argument("gamma must be strictly greater than 1, got " +
                                    std::to_string(gamma_value));
    }
    sqrt_term = std::sqrt(gamma_value * gamma_value - 1.0);
}

}  // namespace admmpep
