#pragma once

#include <stdexcept>
#include <string>

namespace admmpep {

/// Parameter outside the domain of a closed-form expression (e.g. a vanishing
/// denominator or a negative radicand).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A matrix does not have the rank required by the requested factorization.
struct RankError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A point set fails cyclic monotonicity, so no convex interpolant exists.
struct MonotonicityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exhaustive enumeration finished without finding a valid configuration.
struct EnumerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input too large for an exhaustive (factorial / exponential) procedure.
struct SizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace admmpep
