#include "admmpep/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "admmpep/errors.hpp"
#include "admmpep/model.hpp"

namespace admmpep {

namespace {

constexpr double kDenomTol = 1e-13;

void require_denominator(double value, double gamma, const char* what) {
    if (std::abs(value) < kDenomTol) {
        throw DomainError(std::string(what) + " vanishes at gamma = " + std::to_string(gamma));
    }
}

}  // namespace

RankTwoCertificate build_certificate(const GammaContext& ctx) {
    const double g = ctx.gamma;
    const double s = ctx.sqrt_term;  // sqrt(g^2 - 1)

    const double alpha_num = g * g - 2.0;
    const double alpha_den = -8.0 - g + 6.0 * g * g - g * g * g + (-6.0 + 3.0 * g + g * g) * s;
    require_denominator(alpha_den, g, "alpha denominator");
    const double alpha = alpha_num / alpha_den;

    // Shared radicand of four pbar entries; positive on the supported range,
    // tiny negatives from rounding are clamped to zero.
    double t = 1.0 + g - g * g + (g - 1.0) * s;
    if (t < -kDenomTol) {
        throw DomainError("radicand 1+g-g^2+(g-1)*sqrt(g^2-1) negative at gamma = " +
                          std::to_string(g));
    }
    t = std::max(t, 0.0);
    const double r = std::sqrt(t);
    require_denominator(r, g, "sqrt radicand");

    const double q = -1.0 - 3.0 * g + 2.0 * g * g + (3.0 - 2.0 * g) * s;
    const double d11 = 2.0 + g * q;
    require_denominator(d11, g, "pbar(1,1) denominator");

    Mat25 pbar = Mat25::Zero();
    pbar(0, 0) = -q * r / d11;
    pbar(0, 1) = r / g;
    pbar(0, 2) = -s / ((1.0 + g) * r);
    pbar(0, 3) = (1.0 - g * g - g * s) * r / (g + g * g);
    pbar(0, 4) = -2.0 * (g - 1.0) * r / (g * d11);
    pbar(1, 2) = (1.0 + g + s) / (1.0 + g);
    pbar(1, 4) = 1.0;

    RankTwoCertificate cert;
    cert.alpha = alpha;
    cert.pbar = pbar;
    cert.xf = SymMat5(alpha * (pbar.transpose() * pbar));
    cert.objective_value = closed_form_objective(ctx, ObjectiveForm::Compact);
    cert.gamma = g;
    return cert;
}

double closed_form_objective(const GammaContext& ctx, ObjectiveForm form) {
    const double g = ctx.gamma;
    const double s = ctx.sqrt_term;
    require_denominator(g - 1.0, g, "gamma - 1");

    double denom;
    if (form == ObjectiveForm::Expanded) {
        denom = 3.0 + 2.0 / (g - 1.0) - 2.0 * g * g + 2.0 * (-1.0 - g + g * g) * s / (g - 1.0);
    } else {
        denom = 2.0 * (1.0 + g - g * g) / ((g - 1.0) * (g + s)) + 1.0;
    }
    require_denominator(denom, g, "closed-form denominator");
    return 1.0 / denom;
}

FeasibilityReport feasibility_report(const GammaContext& ctx) {
    const RankTwoCertificate cert = build_certificate(ctx);
    const SdpProblem problem = build_problem(ctx);
    const ConstraintValues values = constraint_values(problem, cert.xf);

    FeasibilityReport rep;
    rep.gamma = ctx.gamma;
    rep.inequality_values = values.inequality;
    rep.equality_residual = values.equality - problem.rhs;

    Eigen::SelfAdjointEigenSolver<Mat5> eig(cert.xf.mat());
    const auto& lam = eig.eigenvalues();
    for (int i = 0; i < 5; ++i) rep.eigenvalues[i] = lam(i);
    const double lam_max = lam(4);
    rep.rank_estimate = 0;
    for (int i = 0; i < 5; ++i) {
        if (lam(i) > 1e-8 * std::max(lam_max, 0.0)) ++rep.rank_estimate;
    }

    rep.objective_trace = values.objective;
    rep.objective_expanded = closed_form_objective(ctx, ObjectiveForm::Expanded);
    rep.objective_compact = closed_form_objective(ctx, ObjectiveForm::Compact);
    rep.max_objective_discrepancy =
        std::max({std::abs(rep.objective_trace - rep.objective_expanded),
                  std::abs(rep.objective_trace - rep.objective_compact),
                  std::abs(rep.objective_expanded - rep.objective_compact)});

    rep.inside_claimed_region = ctx.gamma > ctx.phi;

    const double min_ineq = *std::min_element(values.inequality.begin(), values.inequality.end());
    rep.feasible = min_ineq >= -1e-10 && std::abs(rep.equality_residual) <= 1e-10 &&
                   lam(0) >= -1e-10 * std::max(lam_max, 1.0);
    return rep;
}

}  // namespace admmpep
