#include "admmpep/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace admmpep {

namespace {

constexpr double kStepFraction = 0.98;   // fraction-to-boundary factor
constexpr double kObjectiveBound = 1e6;  // beyond this, report NumericalFailure
constexpr int kHardIterationCap = 200;
constexpr int kStallWindow = 20;  // iterations without real progress before giving up

// All interior-point arithmetic runs in extended precision. The instances of
// interest lose strict complementarity on part of the parameter range, which
// drives the Newton systems toward condition numbers near 1/mu^2; the extra
// mantissa bits are what make 1e-9 residuals reachable there. State is cast
// back to double only when the solution object is assembled.
using Real = long double;
using Mat5L = Eigen::Matrix<Real, 5, 5>;
using Vec5L = Eigen::Matrix<Real, 5, 1>;
using MatXL = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VecXL = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Symmetric square-root factor L with L L = M (M symmetric PD), plus its
/// inverse. Eigenvalues are clamped relatively to keep L finite when M is
/// nearly singular at the end of the path. Returns false if M is not usable.
bool sqrt_factor(const Mat5L& M, Mat5L& L, Mat5L& L_inv) {
    Eigen::SelfAdjointEigenSolver<Mat5L> eig(M);
    if (eig.info() != Eigen::Success) return false;
    Vec5L lam = eig.eigenvalues();
    const Real lam_max = lam(4);
    if (!(lam_max > 0.0L) || !lam.allFinite()) return false;
    lam = lam.cwiseMax(Real(1e-18L) * lam_max);
    const Mat5L Q = eig.eigenvectors();
    L = Q * lam.cwiseSqrt().asDiagonal() * Q.transpose();
    L_inv = Q * lam.cwiseSqrt().cwiseInverse().asDiagonal() * Q.transpose();
    return true;
}

Real min_eigenvalue(const Mat5L& M) {
    return Eigen::SelfAdjointEigenSolver<Mat5L>(M).eigenvalues()(0);
}

/// Largest t with P + t * D staying PSD, given the factor L_inv of P.
Real psd_step_limit(const Mat5L& L_inv, const Mat5L& D) {
    const Real lam = min_eigenvalue(L_inv * D * L_inv.transpose());
    if (lam >= 0.0L) return std::numeric_limits<Real>::infinity();
    return -1.0L / lam;
}

Real orthant_step_limit(const VecXL& v, const VecXL& dv) {
    Real limit = std::numeric_limits<Real>::infinity();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (dv(i) < 0.0L) limit = std::min(limit, -v(i) / dv(i));
    }
    return limit;
}

struct CoreProblem {
    SymMat5 C;
    std::vector<SymMat5> A;  // inequalities
    SymMat5 Aeq;
    double rhs = 1.0;
};

/// Factorization of the Schur complement with one step of iterative
/// refinement, to squeeze the last digits out of the nearly singular
/// end-of-path systems.
class SchurSolver {
  public:
    explicit SchurSolver(const MatXL& schur) : m_(schur), lu_(m_) {}

    VecXL solve(const VecXL& rhs) const {
        VecXL x = lu_.solve(rhs);
        x += lu_.solve(rhs - m_ * x);
        return x;
    }

  private:
    MatXL m_;
    Eigen::FullPivLU<MatXL> lu_;
};

SdpSolution run_ipm(const CoreProblem& prob, double tolerance, int max_iterations) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const int m = static_cast<int>(prob.A.size());
    if (m > 6) throw std::invalid_argument("at most 6 inequality matrices supported");
    max_iterations = std::min(std::max(max_iterations, 1), kHardIterationCap);
    const Real cone_dim = Real(5 + m);
    const Real tol = Real(tolerance);

    const Mat5L C = prob.C.mat().cast<Real>();
    std::vector<Mat5L> A(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) A[static_cast<std::size_t>(i)] = prob.A[static_cast<std::size_t>(i)].mat().cast<Real>();
    const Mat5L Aeq = prob.Aeq.mat().cast<Real>();
    const Real rhs = Real(prob.rhs);
    const Real c_norm = C.norm();
    auto dot = [](const Mat5L& a, const Mat5L& b) { return a.cwiseProduct(b).sum(); };

    SdpSolution sol;

    // Strictly interior start: equality-normalized identity, unit orthant point.
    const Real tr_eq = Aeq.trace();
    Mat5L X = (tr_eq > 0.0L ? rhs / tr_eq : 1.0L) * Mat5L::Identity();
    Mat5L Z = Mat5L::Identity();
    VecXL s(m), w(m);
    for (int i = 0; i < m; ++i) s(i) = std::max(dot(A[static_cast<std::size_t>(i)], X), Real(1));
    w.setOnes();
    Real y_eq = 0.0L;  // inequality duals are y_i = -w_i throughout

    auto adjoint = [&](const VecXL& y_ineq, Real ye) {
        Mat5L out = ye * Aeq;
        for (int i = 0; i < m; ++i) out += y_ineq(i) * A[static_cast<std::size_t>(i)];
        return out;
    };

    auto fail = [&](const std::string& why) {
        sol.status = SolveStatus::NumericalFailure;
        sol.diagnostic = why;
        return sol;
    };

    // Best iterate seen, by worst-of-three residual score. On degenerate
    // instances the path loses accuracy once mu hits the numerical floor, so
    // the final iterate is not necessarily the most accurate one.
    struct Snapshot {
        Real score;
        Mat5L X, Z;
        VecXL s, w;
        Real y_eq;
        Residuals res;
    };
    std::optional<Snapshot> best;
    Real mark_score = std::numeric_limits<Real>::infinity();
    int mark_it = 0;

    bool converged = false;
    bool stalled = false;
    int it = 0;
    for (; it <= max_iterations; ++it) {
        // Residuals of the current point.
        VecXL p(m);
        for (int i = 0; i < m; ++i) p(i) = s(i) - dot(A[static_cast<std::size_t>(i)], X);
        const Real p_eq = rhs - dot(Aeq, X);
        const Mat5L R_d = C + Z - adjoint(-w, y_eq);

        const Real pobj = dot(C, X);
        const Real dobj = y_eq * rhs;
        const Real mu = ((X * Z).trace() + s.dot(w)) / cone_dim;

        const Real pinf =
            std::max(m > 0 ? p.cwiseAbs().maxCoeff() : Real(0), std::abs(p_eq)) /
            (1.0L + std::abs(rhs));
        const Real dinf = R_d.norm() / (1.0L + c_norm);
        const Real gap = std::abs(pobj - dobj) / (1.0L + std::abs(pobj));

        IterationRecord rec;
        rec.iteration = it;
        rec.mu = static_cast<double>(mu);
        rec.primal_objective = static_cast<double>(pobj);
        rec.dual_objective = static_cast<double>(dobj);
        rec.primal_infeas = static_cast<double>(pinf);
        rec.dual_infeas = static_cast<double>(dinf);
        rec.gap = static_cast<double>(gap);
        sol.trace.push_back(rec);

        sol.residuals = Residuals{rec.primal_infeas, rec.dual_infeas, rec.gap};
        const Real score = std::max({pinf, dinf, gap});
        if (!best || score < best->score) {
            best = Snapshot{score, X, Z, s, w, y_eq, sol.residuals};
        }
        if (score < 0.5L * mark_score) {
            mark_score = score;
            mark_it = it;
        }
        if (pinf <= tol && dinf <= tol && gap <= tol) {
            converged = true;
            break;
        }
        if (std::abs(pobj) > Real(kObjectiveBound)) {
            return fail("objective exceeded 1e6; problem may be unbounded");
        }
        if (it == max_iterations) break;
        if (it - mark_it >= kStallWindow) {
            stalled = true;
            break;
        }

        // Nesterov-Todd scaling: G maps both X and Z to the same diagonal
        // lambda, W = G G^T satisfies W Z W = X.
        Mat5L Lx, Lx_inv, Lz, Lz_inv;
        if (!sqrt_factor(X, Lx, Lx_inv)) return fail("primal iterate lost definiteness");
        if (!sqrt_factor(Z, Lz, Lz_inv)) return fail("dual iterate lost definiteness");
        Eigen::JacobiSVD<Mat5L> svd(Lz * Lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Vec5L lam = svd.singularValues();  // descending
        if (!(lam(0) > 0.0L) || !lam.allFinite()) return fail("NT scaling collapsed");
        lam = lam.cwiseMax(Real(1e-18L) * lam(0));
        const Mat5L G = Lx * svd.matrixV() * lam.cwiseSqrt().cwiseInverse().asDiagonal();
        const Mat5L G_inv = lam.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * Lx_inv;
        const Mat5L W = G * G.transpose();

        // Schur complement over (inequality duals, equality dual).
        const VecXL d = s.cwiseQuotient(w);
        std::vector<Mat5L> WAW(static_cast<std::size_t>(m) + 1);
        for (int j = 0; j < m; ++j) WAW[static_cast<std::size_t>(j)] = W * A[static_cast<std::size_t>(j)] * W;
        WAW[static_cast<std::size_t>(m)] = W * Aeq * W;
        MatXL schur(m + 1, m + 1);
        for (int i = 0; i <= m; ++i) {
            const Mat5L& Ai = (i < m) ? A[static_cast<std::size_t>(i)] : Aeq;
            for (int j = 0; j <= m; ++j) {
                schur(i, j) = dot(Ai, WAW[static_cast<std::size_t>(j)]);
            }
        }
        for (int i = 0; i < m; ++i) schur(i, i) += d(i);
        const SchurSolver schur_solver(schur);

        // Given complementarity targets, solve for the full direction.
        struct Direction {
            Mat5L dX, dZ;
            VecXL dy, ds, dw;
            Real dy_eq = 0.0L;
        };
        auto solve_direction = [&](const Mat5L& R_c,
                                   const VecXL& r_o) -> std::optional<Direction> {
            const Mat5L RcWRdW = R_c + W * R_d * W;
            VecXL h(m + 1);
            for (int i = 0; i < m; ++i) {
                h(i) = dot(A[static_cast<std::size_t>(i)], RcWRdW) - p(i) - r_o(i);
            }
            h(m) = dot(Aeq, RcWRdW) - p_eq;
            VecXL dy_all = schur_solver.solve(h);
            if (!dy_all.allFinite()) return std::nullopt;
            Direction dir;
            dir.dy = dy_all.head(m);
            dir.dy_eq = dy_all(m);
            Mat5L dZ = adjoint(dir.dy, dir.dy_eq) - R_d;
            dir.dZ = 0.5L * (dZ + dZ.transpose());
            Mat5L dX = R_c - W * dir.dZ * W;
            dir.dX = 0.5L * (dX + dX.transpose());
            dir.dw = -dir.dy;
            dir.ds = r_o - d.cwiseProduct(dir.dw);
            if (!dir.dX.allFinite() || !dir.dZ.allFinite() || !dir.ds.allFinite()) {
                return std::nullopt;
            }
            return dir;
        };

        auto step_limits = [&](const Direction& dir) {
            const Real ap =
                std::min(psd_step_limit(Lx_inv, dir.dX), orthant_step_limit(s, dir.ds));
            const Real ad =
                std::min(psd_step_limit(Lz_inv, dir.dZ), orthant_step_limit(w, dir.dw));
            return std::pair<Real, Real>(std::min(Real(1), Real(kStepFraction) * ap),
                                         std::min(Real(1), Real(kStepFraction) * ad));
        };

        // Predictor (affine scaling) pass.
        const auto aff = solve_direction(-X, -s);
        if (!aff) return fail("Newton system singular in predictor pass");
        const auto [ap_aff, ad_aff] = step_limits(*aff);
        const Real mu_aff =
            (((X + ap_aff * aff->dX) * (Z + ad_aff * aff->dZ)).trace() +
             (s + ap_aff * aff->ds).dot(w + ad_aff * aff->dw)) /
            cone_dim;
        const Real ratio = std::max(mu_aff, Real(0)) / mu;
        const Real sigma = std::min(Real(1), ratio * ratio * ratio);

        // Corrector pass with the Mehrotra second-order term, assembled in the
        // scaled space where both cone blocks sit at the diagonal lambda.
        const Mat5L dX_hat = G_inv * aff->dX * G_inv.transpose();
        const Mat5L dZ_hat = G.transpose() * aff->dZ * G;
        const Mat5L prod = dX_hat * dZ_hat;
        const Mat5L D = 0.5L * (prod + prod.transpose());
        Mat5L E;
        for (int k = 0; k < 5; ++k) {
            for (int l = 0; l < 5; ++l) {
                const Real num = (k == l ? 2.0L * (sigma * mu - lam(k) * lam(k)) : 0.0L) -
                                 2.0L * D(k, l);
                E(k, l) = num / (lam(k) + lam(l));
            }
        }
        const Mat5L R_c = G * E * G.transpose();
        VecXL r_o(m);
        for (int i = 0; i < m; ++i) {
            r_o(i) = (sigma * mu - s(i) * w(i) - aff->ds(i) * aff->dw(i)) / w(i);
        }

        const auto dir = solve_direction(R_c, r_o);
        if (!dir) return fail("Newton system singular in corrector pass");
        const auto [ap, ad] = step_limits(*dir);

        sol.trace.back().sigma = static_cast<double>(sigma);
        sol.trace.back().step_primal = static_cast<double>(ap);
        sol.trace.back().step_dual = static_cast<double>(ad);

        X += ap * dir->dX;
        X = 0.5L * (X + X.transpose()).eval();
        s += ap * dir->ds;
        Z += ad * dir->dZ;
        Z = 0.5L * (Z + Z.transpose()).eval();
        w += ad * dir->dw;
        y_eq += ad * dir->dy_eq;
    }

    if (!converged && best) {
        const Real final_score =
            std::max({Real(sol.residuals.primal_infeas), Real(sol.residuals.dual_infeas),
                      Real(sol.residuals.gap)});
        if (best->score < final_score) {
            X = best->X;
            Z = best->Z;
            s = best->s;
            w = best->w;
            y_eq = best->y_eq;
            sol.residuals = best->res;
        }
    }

    sol.X = SymMat5(Mat5(X.cast<double>()));
    for (int i = 0; i < m; ++i) {
        sol.slack[static_cast<std::size_t>(i)] = static_cast<double>(s(i));
        sol.dual_ineq[static_cast<std::size_t>(i)] = static_cast<double>(-w(i));
    }
    sol.dual_eq = static_cast<double>(y_eq);
    sol.dual_slack_matrix = SymMat5(Mat5(Z.cast<double>()));
    sol.objective = static_cast<double>(dot(C, X));
    sol.iterations = it;
    sol.status = converged ? SolveStatus::Optimal : SolveStatus::MaxIterations;
    if (stalled) {
        sol.diagnostic = "progress stalled before reaching tolerance; best iterate kept";
    } else if (!converged) {
        sol.diagnostic = "tolerance not reached within iteration cap";
    }
    return sol;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, double tolerance, int max_iterations) {
    CoreProblem core;
    core.C = problem.C;
    core.A.assign(problem.A.begin(), problem.A.end());
    core.Aeq = problem.A7;
    core.rhs = problem.rhs;
    return run_ipm(core, tolerance, max_iterations);
}

SdpSolution solve_generic(const SymMat5& objective,
                          const std::vector<SymMat5>& inequalities, const SymMat5& equality,
                          double equality_rhs, double tolerance, int max_iterations) {
    CoreProblem core{objective, inequalities, equality, equality_rhs};
    return run_ipm(core, tolerance, max_iterations);
}

Residuals kkt_report(const SdpProblem& problem, const SdpSolution& solution) {
    const ConstraintValues cv = constraint_values(problem, solution.X);

    double primal = std::abs(cv.equality - problem.rhs);
    for (double v : cv.inequality) primal = std::max(primal, -v);
    primal = std::max(
        primal,
        -static_cast<double>(min_eigenvalue(solution.X.mat().cast<Real>())));

    // Dual feasibility convention: Z = sum_i y_i A[i] + y_eq A7 - C with the
    // inequality duals y_i <= 0 (so -y_i is the usual nonnegative multiplier).
    Mat5 R = solution.dual_eq * problem.A7.mat() - problem.C.mat() -
             solution.dual_slack_matrix.mat();
    for (std::size_t i = 0; i < 6; ++i) R += solution.dual_ineq[i] * problem.A[i].mat();

    Residuals res;
    res.primal_infeas = std::max(primal, 0.0);
    res.dual_infeas = R.norm();
    res.gap = std::abs(cv.objective - solution.dual_eq * problem.rhs) /
              (1.0 + std::abs(cv.objective));
    return res;
}

}  // namespace admmpep
