#pragma once

#include <array>
#include <string>
#include <vector>

#include "admmpep/model.hpp"
#include "admmpep/sym_mat.hpp"

namespace admmpep {

enum class SolveStatus { Optimal, MaxIterations, NumericalFailure };

struct Residuals {
    double primal_infeas = 0.0;
    double dual_infeas = 0.0;
    double gap = 0.0;  ///< |primal - dual objective| / (1 + |primal objective|)
};

/// One interior-point iteration snapshot (recorded before the Newton step).
struct IterationRecord {
    int iteration = 0;
    double mu = 0.0;
    double sigma = 0.0;
    double step_primal = 0.0;
    double step_dual = 0.0;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double primal_infeas = 0.0;
    double dual_infeas = 0.0;
    double gap = 0.0;
};

struct SdpSolution {
    SymMat5 X;
    std::array<double, 6> slack{};      ///< s_i paired with <A[i], X> >= 0
    std::array<double, 6> dual_ineq{};  ///< y_i <= 0 (multiplier of <A[i], X> >= 0 is -y_i)
    double dual_eq = 0.0;               ///< y_eq; dual objective is y_eq * rhs
    SymMat5 dual_slack_matrix;          ///< Z = sum_i y_i A[i] + y_eq A7 - C, PSD
    double objective = 0.0;             ///< <C, X>
    SolveStatus status = SolveStatus::NumericalFailure;
    Residuals residuals;
    int iterations = 0;
    std::vector<IterationRecord> trace;
    std::string diagnostic;  ///< non-empty on failure
};

/// Primal-dual predictor-corrector interior-point method for
///   maximize <C, X>  s.t.  <A[i], X> >= 0,  <A7, X> = rhs,  X PSD,
/// over the product cone (5x5 PSD) x (orthant of the 6 slacks).
/// Deterministic; hard iteration cap 200.
SdpSolution solve(const SdpProblem& problem, double tolerance = 1e-9,
                  int max_iterations = 200);

/// Same path-following core with an arbitrary inequality list (up to 6);
/// used by self-tests such as the pure eigenvalue placement problem.
SdpSolution solve_generic(const SymMat5& objective,
                          const std::vector<SymMat5>& inequalities, const SymMat5& equality,
                          double equality_rhs, double tolerance, int max_iterations);

/// Recomputes KKT residuals from scratch: primal infeasibility is the largest
/// of equality violation, negative constraint value, and negative eigenvalue
/// of X; dual infeasibility is |sum_i y_i A[i] + y_eq A7 - C - Z|_F.
Residuals kkt_report(const SdpProblem& problem, const SdpSolution& solution);

}  // namespace admmpep
