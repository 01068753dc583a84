#include "admmpep/model.hpp"

namespace admmpep {

SdpProblem build_problem(const GammaContext& ctx) {
    const double g = ctx.gamma;
    const Vec5 e1 = Vec5::Unit(0);
    const Vec5 e2 = Vec5::Unit(1);
    const Vec5 e3 = Vec5::Unit(2);
    const Vec5 e4 = Vec5::Unit(3);
    const Vec5 e5 = Vec5::Unit(4);

    // Recurring directions: e1+e2 is x_k+y_k, e3+e4 is x_next+y_next on the
    // Grammian index convention; e5 is z_k - z_star.
    const Vec5 u12 = e1 + e2;
    const Vec5 u34 = e3 + e4;

    SdpProblem p;
    p.A[0] = sym_outer(e3, e5 - e3 - e2);
    p.A[1] = sym_outer(e2, e5 + (g - 1.0) * u12);
    p.A[2] = sym_outer(e4, e5 - e3 - e4);
    p.A[3] = sym_outer(e2 - e4, u34 + (g - 1.0) * u12);
    p.A[4] = sym_outer(e4, -u34 - (g - 1.0) * u12) + sym_outer(e2, e5 + (g - 1.0) * u12);
    p.A[5] = sym_outer(e2, u34 + (g - 1.0) * u12) + sym_outer(e4, e5 - e3 - e4);
    p.A7 = sym_outer(e5, e5) + g * sym_outer(e2, e2) + (g - 1.0) * sym_outer(u12, u12);
    p.C = sym_outer(e5 - g * u34, e5 - g * u34) + g * sym_outer(e4, e4) +
          (g - 1.0) * sym_outer(u34, u34);
    p.rhs = 1.0;
    return p;
}

ConstraintValues constraint_values(const SdpProblem& problem, const SymMat5& X) {
    ConstraintValues v{};
    for (int i = 0; i < 6; ++i) v.inequality[i] = inner(problem.A[i], X);
    v.equality = inner(problem.A7, X);
    v.objective = inner(problem.C, X);
    return v;
}

}  // namespace admmpep
