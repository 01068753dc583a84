#pragma once

#include <array>

#include <Eigen/Dense>

#include "admmpep/gamma_context.hpp"
#include "admmpep/sym_mat.hpp"

namespace admmpep {

using Mat25 = Eigen::Matrix<double, 2, 5>;

/// The analytic rank-two feasible point X_f = alpha * pbar^T pbar of the SDP,
/// together with its closed-form objective value.
struct RankTwoCertificate {
    double alpha;            ///< positive scale factor
    Mat25 pbar;              ///< 2x5 factor
    SymMat5 xf;              ///< alpha * pbar^T pbar
    double objective_value;  ///< compact closed form of <C, xf>
    double gamma;
};

enum class ObjectiveForm { Expanded, Compact };

/// Evaluates every entry formula of the certificate.
/// Throws DomainError if a radicand is negative or a denominator vanishes
/// (within 1e-13); neither occurs for gamma in (1, 2.5] in practice.
RankTwoCertificate build_certificate(const GammaContext& ctx);

/// Closed form of <C, X_f> in either algebraic arrangement; the two agree to
/// machine precision away from gamma = 1.
double closed_form_objective(const GammaContext& ctx, ObjectiveForm form);

/// Numeric feasibility and multi-path objective agreement for the certificate.
struct FeasibilityReport {
    double gamma;
    std::array<double, 6> inequality_values;  ///< <A[i], xf>, want >= 0
    double equality_residual;                 ///< <A7, xf> - 1
    std::array<double, 5> eigenvalues;        ///< of xf, ascending
    int rank_estimate;                        ///< eigenvalues above 1e-8 * lambda_max
    double objective_trace;                   ///< <C, xf> via the inner product
    double objective_expanded;
    double objective_compact;
    double max_objective_discrepancy;  ///< max pairwise gap of the three paths
    bool inside_claimed_region;        ///< gamma above the golden ratio
    bool feasible;                     ///< constraints hold within 1e-10, xf PSD
};

FeasibilityReport feasibility_report(const GammaContext& ctx);

}  // namespace admmpep
