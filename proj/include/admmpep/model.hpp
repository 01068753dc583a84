#pragma once

#include <array>

#include "admmpep/gamma_context.hpp"
#include "admmpep/sym_mat.hpp"

namespace admmpep {

/// Data of the lifted performance-estimation SDP
///   maximize <C, X>
///   s.t.     <A[i], X> >= 0   (i = 0..5)
///            <A7, X>   =  rhs
///            X PSD.
/// The Grammian index convention: a factor P has columns
/// [x_k, y_k, x_next, y_next, z_k - z_star] so that X = P^T P.
struct SdpProblem {
    SymMat5 C;                 ///< objective matrix
    std::array<SymMat5, 6> A;  ///< inequality constraint matrices
    SymMat5 A7;                ///< normalization (equality) matrix
    double rhs = 1.0;
};

/// Constraint and objective forms evaluated at a candidate X.
struct ConstraintValues {
    std::array<double, 6> inequality;  ///< <A[i], X>
    double equality;                   ///< <A7, X>
    double objective;                  ///< <C, X>
};

/// Assembles all eight parametric matrices for the given gamma.
SdpProblem build_problem(const GammaContext& ctx);

/// Evaluates every constraint form and the objective at X.
ConstraintValues constraint_values(const SdpProblem& problem, const SymMat5& X);

}  // namespace admmpep
