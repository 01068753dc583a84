#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "admmpep/admm.hpp"
#include "admmpep/certificate.hpp"
#include "admmpep/errors.hpp"
#include "admmpep/gamma_context.hpp"
#include "admmpep/interpolate.hpp"
#include "admmpep/model.hpp"
#include "admmpep/sdp_solver.hpp"

#include "oracles.hpp"

using namespace admmpep;

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}

PiecewiseConvexFn abs_fn() {
    PiecewiseConvexFn fn;
    fn.dim = 1;
    fn.pieces = {{vec1(1.0), 0.0}, {vec1(-1.0), 0.0}};
    return fn;
}

// Frozen analytic factor sqrt(alpha) * pbar at gamma = 1.8; columns are
// x_k, y_k, x_next, y_next, z_k.
constexpr double kRow1_18[5] = {0.53937319882384731, 0.19327372780340396,
                                -0.24554208358066406, -0.34057545772113696,
                                -0.58611754130180101};
constexpr double kRow2_18[5] = {0.0, 0.0, 0.61344537961727976, 0.0, 0.39976304425872378};

}  // namespace

TEST_SUITE("admm") {

TEST_CASE("rank-two factorization of a projector") {
    Mat5 X = Mat5::Zero();
    X(0, 0) = 1.0;
    X(1, 1) = 1.0;
    const auto P = factor_rank2(SymMat5(X), 1e-10);
    CHECK((P.transpose() * P - X).norm() <= 1e-13);
}

TEST_CASE("factorization rejects wrong rank and indefiniteness") {
    CHECK_THROWS_AS(factor_rank2(SymMat5::identity(), 1e-8), RankError);
    Mat5 negative = Mat5::Zero();
    negative(0, 0) = -1.0;
    CHECK_THROWS_AS(factor_rank2(SymMat5(negative), 1e-8), RankError);
}

TEST_CASE("factorization reproduces the certificate matrix") {
    const RankTwoCertificate cert = build_certificate(GammaContext(1.8));
    const auto P = factor_rank2(cert.xf, 1e-8);
    CHECK((P.transpose() * P - cert.xf.mat()).norm() <= 1e-10 * cert.xf.mat().norm());
}

TEST_CASE("solver matrix factors onto the analytic certificate") {
    const GammaContext ctx(1.8);
    const SdpSolution sol = solve(build_problem(ctx));
    REQUIRE(sol.status == SolveStatus::Optimal);
    const auto P = factor_rank2(sol.X, 1e-6);
    CHECK((P.transpose() * P - sol.X.mat()).norm() <= 1e-5 * sol.X.mat().norm());
    // The two factor paths agree through their Grammians, not entrywise.
    const RankTwoCertificate cert = build_certificate(ctx);
    CHECK((P.transpose() * P - cert.xf.mat()).norm() <= 1e-4);
}

TEST_CASE("instance states come from the factor columns") {
    const CounterexampleInstance inst = build_instance(GammaContext(1.8));
    CHECK(inst.dimension == 2);
    CHECK(inst.z_star.isZero(0.0));

    CHECK((inst.state_k.x - vec2(kRow1_18[0], kRow2_18[0])).norm() <= 1e-15);
    CHECK((inst.state_k.y - vec2(kRow1_18[1], kRow2_18[1])).norm() <= 1e-15);
    CHECK((inst.state_k.z - vec2(kRow1_18[4], kRow2_18[4])).norm() <= 1e-15);
    CHECK((inst.designated_next.x - vec2(kRow1_18[2], kRow2_18[2])).norm() <= 1e-15);
    CHECK((inst.designated_next.y - vec2(kRow1_18[3], kRow2_18[3])).norm() <= 1e-15);
    CHECK((inst.designated_next.z -
           vec2(0.46889403304144081, -0.70443863905237979)).norm() <= 1e-14);

    const CounterexampleInstance inst2 = build_instance(GammaContext(2.0));
    CHECK((inst2.designated_next.z -
           vec2(0.62796303019955438, -0.84748658561247083)).norm() <= 1e-14);
}

TEST_CASE("instances require the claimed region") {
    CHECK_THROWS_AS(build_instance(GammaContext(1.6)), std::invalid_argument);
}

TEST_CASE("prox of simple functions") {
    PiecewiseConvexFn zero;
    zero.dim = 2;
    zero.pieces = {{Eigen::VectorXd::Zero(2), 0.0}};
    const Eigen::VectorXd v = vec2(0.7, -1.3);
    CHECK((prox_step(zero, v) - v).norm() <= 1e-14);

    const PiecewiseConvexFn fn = abs_fn();
    CHECK(prox_step(fn, vec1(3.0))(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(prox_step(fn, vec1(-3.0))(0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(prox_step(fn, vec1(0.5))(0) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK(prox_weighted(fn, vec1(3.0), 2.0)(0) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("weighted prox matches the scaled identity") {
    std::mt19937 rng(91003);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 1 + trial % 2;
        PiecewiseConvexFn fn;
        fn.dim = dim;
        const int pieces = 1 + trial % 4;
        for (int p = 0; p < pieces; ++p) {
            Eigen::VectorXd slope(dim);
            for (int k = 0; k < dim; ++k) slope(k) = unit(rng);
            fn.pieces.push_back({slope, unit(rng)});
        }
        Eigen::VectorXd v(dim);
        for (int k = 0; k < dim; ++k) v(k) = 2.0 * unit(rng);
        const double weight = 0.5 + trial * 0.1;
        const Eigen::VectorXd a = prox_weighted(fn, v, weight);
        const Eigen::VectorXd b = prox_step(scaled(fn, 1.0 / weight), v);
        CHECK((a - b).norm() <= 1e-10);
    }
}

TEST_CASE("prox refuses oversized piece lists") {
    PiecewiseConvexFn fn;
    fn.dim = 1;
    for (int i = 0; i < 9; ++i) fn.pieces.push_back({vec1(i), 0.0});
    CHECK_THROWS_AS(prox_step(fn, vec1(0.0)), SizeError);
}

TEST_CASE("prox agrees with the grid-descent oracle") {
    std::mt19937 rng(64004);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = 1 + trial % 2;
        PiecewiseConvexFn fn;
        fn.dim = dim;
        const int pieces = 1 + trial % 4;
        for (int p = 0; p < pieces; ++p) {
            Eigen::VectorXd slope(dim);
            for (int k = 0; k < dim; ++k) slope(k) = unit(rng);
            fn.pieces.push_back({slope, unit(rng)});
        }
        Eigen::VectorXd v(dim);
        for (int k = 0; k < dim; ++k) v(k) = 2.0 * unit(rng);

        const Eigen::VectorXd fast = prox_step(fn, v);
        const Eigen::VectorXd slow = test_oracles::prox_oracle(fn, v);
        CAPTURE(trial);
        CHECK((fast - slow).lpNorm<Eigen::Infinity>() <= 1e-6);
    }
}

TEST_CASE("one replayed iteration lands on the designated state") {
    for (int i = 0; i <= 7; ++i) {
        const double g = 1.65 + 0.05 * i;
        CAPTURE(g);
        const GammaContext ctx(g);
        const CounterexampleInstance inst = build_instance(ctx);
        const AdmmState next = admm_step(inst);

        CHECK((next.x - inst.designated_next.x).lpNorm<Eigen::Infinity>() <= 1e-7);
        CHECK((next.y - inst.designated_next.y).lpNorm<Eigen::Infinity>() <= 1e-7);
        CHECK((next.z - inst.designated_next.z).lpNorm<Eigen::Infinity>() <= 1e-7);

        const double r_k = measure_R(inst.state_k, inst.z_star, ctx);
        const double r_next = measure_R(next, inst.z_star, ctx);
        const double closed = closed_form_objective(ctx, ObjectiveForm::Compact);
        CHECK(std::abs(r_k - 1.0) <= 1e-8);
        CHECK(std::abs(r_next - closed) <= 1e-6);
        CHECK(r_next / r_k > 1.0);
    }
}

TEST_CASE("the measure of the designated state equals the closed form") {
    const GammaContext ctx(1.9);
    const CounterexampleInstance inst = build_instance(ctx);
    CHECK(std::abs(measure_R(inst.designated_next, inst.z_star, ctx) -
                   closed_form_objective(ctx, ObjectiveForm::Compact)) <= 1e-7);

    AdmmState origin{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2),
                     Eigen::VectorXd::Zero(2)};
    CHECK(measure_R(origin, inst.z_star, ctx) == 0.0);
}

TEST_CASE("the origin is a fixed point") {
    const GammaContext ctx(1.8);
    CounterexampleInstance inst = build_instance(ctx);
    inst.state_k = {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2),
                    Eigen::VectorXd::Zero(2)};
    const AdmmState next = admm_step(inst);
    CHECK(next.x.norm() <= 1e-12);
    CHECK(next.y.norm() <= 1e-12);
    CHECK(next.z.norm() <= 1e-12);
}

TEST_CASE("subgradient inclusions of the reconstruction") {
    for (double g : {1.8, 2.0}) {
        CAPTURE(g);
        const GammaContext ctx(g);
        const CounterexampleInstance inst = build_instance(ctx);
        const auto& k = inst.state_k;
        const auto& n = inst.designated_next;

        CHECK(subdiff_contains(inst.f, Eigen::VectorXd::Zero(2), inst.z_star, 1e-9));
        CHECK(subdiff_contains(inst.f, n.x, k.z - n.x - k.y, 1e-9));
        CHECK(subdiff_contains(inst.g, n.y, k.z - n.x - n.y, 1e-9));
        // Reachability: state_k itself is an ADMM iterate from z^{k-1}.
        CHECK(subdiff_contains(inst.g, k.y, k.z + (ctx.gamma - 1.0) * (k.x + k.y), 1e-9));
    }
}

TEST_CASE("measure ratio never exceeds one below the threshold") {
    for (double g : {1.50, 1.55, 1.60}) {
        CAPTURE(g);
        const GammaContext ctx(g);
        const SdpSolution sol = solve(build_problem(ctx));
        REQUIRE(sol.status == SolveStatus::Optimal);
        const Eigen::MatrixXd P = factor_psd(sol.X, 1e-6);
        const CounterexampleInstance inst = build_instance_from_factor(P, g);
        const AdmmState next = admm_step(inst);
        const double ratio = measure_R(next, inst.z_star, ctx) /
                             measure_R(inst.state_k, inst.z_star, ctx);
        CHECK(ratio <= 1.0 + 1e-6);
    }
}

TEST_CASE("penalty scaling leaves iterates and ratios unchanged") {
    const GammaContext ctx(1.8);
    const CounterexampleInstance inst = build_instance(ctx);
    const AdmmState base_next = admm_step(inst);
    const Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
    const double base_ratio = measure_R(base_next, inst.z_star, ctx) /
                              measure_R(inst.state_k, inst.z_star, ctx);

    for (double beta : {0.5, 2.0, 10.0}) {
        CAPTURE(beta);
        // Penalty 1/beta on (beta f, beta g, beta I, beta I, 0) replays the
        // unit-penalty baseline exactly.
        ReplayConfig cfg;
        cfg.penalty = 1.0 / beta;
        cfg.coupling = beta;
        cfg.offset = zero2;
        const PiecewiseConvexFn fs = scaled(inst.f, beta);
        const PiecewiseConvexFn gs = scaled(inst.g, beta);

        const AdmmState next = admm_step_general(fs, gs, inst.state_k, ctx, cfg);
        CHECK((next.x - base_next.x).norm() <= 1e-12);
        CHECK((next.y - base_next.y).norm() <= 1e-12);
        CHECK((next.z - base_next.z).norm() <= 1e-12);

        const double rk = measure_general(inst.state_k, inst.z_star, zero2, ctx, cfg);
        const double rn = measure_general(next, inst.z_star, zero2, ctx, cfg);
        CHECK(std::abs(rn / rk - base_ratio) <= 1e-10);
    }
}

TEST_CASE("default replay configuration reduces to the plain forms") {
    const GammaContext ctx(1.75);
    const CounterexampleInstance inst = build_instance(ctx);
    const ReplayConfig cfg;
    const Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
    const AdmmState a = admm_step(inst);
    const AdmmState b = admm_step_general(inst.f, inst.g, inst.state_k, ctx, cfg);
    CHECK((a.x - b.x).norm() == 0.0);
    CHECK((a.z - b.z).norm() == 0.0);
    CHECK(measure_general(inst.state_k, inst.z_star, zero2, ctx, cfg) ==
          doctest::Approx(measure_R(inst.state_k, inst.z_star, ctx)).epsilon(1e-15));
}

TEST_CASE("translating the problem leaves the ratio unchanged") {
    const GammaContext ctx(1.8);
    const CounterexampleInstance inst = build_instance(ctx);
    const AdmmState base_next = admm_step(inst);
    const double base_rk = measure_R(inst.state_k, inst.z_star, ctx);
    const double base_ratio = measure_R(base_next, inst.z_star, ctx) / base_rk;

    const Eigen::VectorXd a = vec2(0.3, -0.2);
    const Eigen::VectorXd c = vec2(-0.1, 0.4);
    const Eigen::VectorXd w = vec2(0.2, 0.1);

    // x-solution shifts by a, y-solution by c, dual by w; the constraint
    // offset becomes a + c and the new primal-dual anchor is (a, c, w).
    const PiecewiseConvexFn fh = tilted(translated(inst.f, a), w);
    const PiecewiseConvexFn gh = tilted(translated(inst.g, c), w);
    ReplayConfig cfg;
    cfg.offset = a + c;
    const AdmmState shifted{inst.state_k.x + a, inst.state_k.y + c, inst.state_k.z + w};

    const AdmmState next = admm_step_general(fh, gh, shifted, ctx, cfg);
    CHECK((next.x - (base_next.x + a)).norm() <= 1e-9);
    CHECK((next.y - (base_next.y + c)).norm() <= 1e-9);
    CHECK((next.z - (base_next.z + w)).norm() <= 1e-9);

    const double rk = measure_general(shifted, w, c, ctx, cfg);
    const double rn = measure_general(next, w, c, ctx, cfg);
    CHECK(std::abs(rk - base_rk) <= 1e-10);
    CHECK(std::abs(rn / rk - base_ratio) <= 1e-10);
}

TEST_CASE("json export carries the replayed measures") {
    const GammaContext ctx(1.8);
    const CounterexampleInstance inst = build_instance(ctx);
    nlohmann::json j = inst;
    for (const char* key : {"gamma", "z_star", "state_k", "next", "f", "g", "R_k", "R_next"}) {
        CAPTURE(key);
        CHECK(j.contains(key));
    }
    CHECK(j["gamma"].get<double>() == 1.8);
    CHECK(j["R_k"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(j["R_next"].get<double>() ==
          doctest::Approx(closed_form_objective(ctx, ObjectiveForm::Compact)).epsilon(1e-6));

    const CounterexampleInstance back = j.get<CounterexampleInstance>();
    CHECK(back.gamma == inst.gamma);
    CHECK((back.state_k.x - inst.state_k.x).norm() == 0.0);
    CHECK((back.designated_next.z - inst.designated_next.z).norm() == 0.0);
    CHECK(back.f.pieces.size() == inst.f.pieces.size());
    CHECK(back.g.pieces.size() == inst.g.pieces.size());
}

}  // TEST_SUITE
