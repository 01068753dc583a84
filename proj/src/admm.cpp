#include "admmpep/admm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "admmpep/certificate.hpp"
#include "admmpep/errors.hpp"

namespace admmpep {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd from_std(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void to_json(nlohmann::json& j, const AdmmState& s) {
    j = nlohmann::json{{"x", to_std(s.x)}, {"y", to_std(s.y)}, {"z", to_std(s.z)}};
}

void from_json(const nlohmann::json& j, AdmmState& s) {
    s.x = from_std(j.at("x").get<std::vector<double>>());
    s.y = from_std(j.at("y").get<std::vector<double>>());
    s.z = from_std(j.at("z").get<std::vector<double>>());
}

void to_json(nlohmann::json& j, const CounterexampleInstance& inst) {
    const GammaContext ctx(inst.gamma);
    j = nlohmann::json{{"gamma", inst.gamma},
                       {"z_star", to_std(inst.z_star)},
                       {"state_k", inst.state_k},
                       {"next", inst.designated_next},
                       {"f", inst.f},
                       {"g", inst.g},
                       {"R_k", measure_R(inst.state_k, inst.z_star, ctx)},
                       {"R_next", measure_R(inst.designated_next, inst.z_star, ctx)}};
}

void from_json(const nlohmann::json& j, CounterexampleInstance& inst) {
    inst.gamma = j.at("gamma").get<double>();
    inst.z_star = from_std(j.at("z_star").get<std::vector<double>>());
    inst.state_k = j.at("state_k").get<AdmmState>();
    inst.designated_next = j.at("next").get<AdmmState>();
    inst.f = j.at("f").get<PiecewiseConvexFn>();
    inst.g = j.at("g").get<PiecewiseConvexFn>();
    inst.dimension = static_cast<int>(inst.z_star.size());
}

Eigen::Matrix<double, 2, 5> factor_rank2(const SymMat5& X, double tolerance) {
    Eigen::SelfAdjointEigenSolver<Mat5> eig(X.mat());
    const auto& lam = eig.eigenvalues();  // ascending
    const double lam_max = lam(4);
    if (!(lam_max > 0.0)) throw RankError("matrix is not rank 2: no positive eigenvalue");
    if (lam(0) < -tolerance * lam_max) {
        throw RankError("matrix is not PSD within tolerance");
    }
    if (lam(2) > tolerance * lam_max) {
        throw RankError("matrix is not rank 2 within tolerance: third eigenvalue " +
                        std::to_string(lam(2)));
    }
    Eigen::Matrix<double, 2, 5> P;
    P.row(0) = std::sqrt(std::max(lam(4), 0.0)) * eig.eigenvectors().col(4).transpose();
    P.row(1) = std::sqrt(std::max(lam(3), 0.0)) * eig.eigenvectors().col(3).transpose();
    return P;
}

Eigen::MatrixXd factor_psd(const SymMat5& X, double tolerance) {
    Eigen::SelfAdjointEigenSolver<Mat5> eig(X.mat());
    const auto& lam = eig.eigenvalues();
    const double lam_max = lam(4);
    if (!(lam_max > 0.0)) throw RankError("matrix has no positive eigenvalue");
    if (lam(0) < -tolerance * lam_max) {
        throw RankError("matrix is not PSD within tolerance");
    }
    int rank = 0;
    for (int i = 0; i < 5; ++i) {
        if (lam(i) > tolerance * lam_max) ++rank;
    }
    Eigen::MatrixXd P(rank, 5);
    for (int r = 0; r < rank; ++r) {
        const int i = 4 - r;  // descending eigenvalue order
        P.row(r) = std::sqrt(lam(i)) * eig.eigenvectors().col(i).transpose();
    }
    return P;
}

CounterexampleInstance build_instance(const GammaContext& ctx) {
    if (!(ctx.gamma > ctx.phi)) {
        throw std::invalid_argument("counterexample requires gamma above the golden ratio");
    }
    const RankTwoCertificate cert = build_certificate(ctx);
    if (!(cert.alpha > 0.0)) {
        throw DomainError("certificate scale alpha is not positive at gamma = " +
                          std::to_string(ctx.gamma));
    }
    const Eigen::MatrixXd factor = std::sqrt(cert.alpha) * cert.pbar;
    return build_instance_from_factor(factor, ctx.gamma);
}

CounterexampleInstance build_instance_from_factor(const Eigen::MatrixXd& factor, double gamma) {
    if (factor.cols() != 5 || factor.rows() < 1) {
        throw std::invalid_argument("Grammian factor must have 5 columns");
    }
    const GammaContext ctx(gamma);
    const Eigen::VectorXd x_k = factor.col(0);
    const Eigen::VectorXd y_k = factor.col(1);
    const Eigen::VectorXd x_next = factor.col(2);
    const Eigen::VectorXd y_next = factor.col(3);
    const Eigen::VectorXd z_k = factor.col(4);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(factor.rows());

    // S1 and S2 are the point-subgradient pairs forced by the prox optimality
    // conditions of the two designated iterations; z_star = 0.
    const std::vector<MonotonePoint> s1 = {{zero, zero}, {x_next, z_k - x_next - y_k}};
    const std::vector<MonotonePoint> s2 = {{zero, zero},
                                           {y_k, z_k + (gamma - 1.0) * (x_k + y_k)},
                                           {y_next, z_k - x_next - y_next}};

    CounterexampleInstance inst;
    inst.f = interpolant(s1);
    inst.g = interpolant(s2);
    inst.dimension = static_cast<int>(factor.rows());
    inst.z_star = zero;
    inst.state_k = AdmmState{x_k, y_k, z_k};
    inst.designated_next = AdmmState{x_next, y_next, z_k - gamma * (x_next + y_next)};
    inst.gamma = gamma;
    return inst;
}

Eigen::VectorXd prox_weighted(const PiecewiseConvexFn& fn, const Eigen::VectorXd& v,
                              double weight) {
    if (!(weight > 0.0)) throw std::invalid_argument("prox weight must be positive");
    if (v.size() != fn.dim) throw std::invalid_argument("prox dimension mismatch");
    const std::size_t p = fn.pieces.size();
    if (p > 8) throw SizeError("prox enumeration limited to 8 pieces");
    const Eigen::Index d = fn.dim;

    // Candidate active sets in order of increasing size; the first candidate
    // with simplex multipliers and slack inactive pieces is the minimizer.
    std::vector<unsigned> masks;
    for (unsigned mask = 1; mask < (1u << p); ++mask) masks.push_back(mask);
    std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
        return __builtin_popcount(a) < __builtin_popcount(b);
    });

    for (const unsigned mask : masks) {
        std::vector<std::size_t> act;
        for (std::size_t i = 0; i < p; ++i) {
            if (mask & (1u << i)) act.push_back(i);
        }
        const std::size_t k = act.size();
        // Unknowns: x (d), lambda (k), level m (1).
        // Stationarity  weight (x - v) + sum lambda_i slope_i = 0
        // Simplex       sum lambda_i = 1
        // Tightness     <slope_i, x> + intercept_i = m for active i
        const Eigen::Index nvar = d + static_cast<Eigen::Index>(k) + 1;
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nvar, nvar);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nvar);
        K.topLeftCorner(d, d) = weight * Eigen::MatrixXd::Identity(d, d);
        for (std::size_t i = 0; i < k; ++i) {
            K.block(0, d + static_cast<Eigen::Index>(i), d, 1) = fn.pieces[act[i]].slope;
        }
        rhs.head(d) = weight * v;
        K.row(d).segment(d, static_cast<Eigen::Index>(k)).setOnes();
        rhs(d) = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
            const Eigen::Index row = d + 1 + static_cast<Eigen::Index>(i);
            K.block(row, 0, 1, d) = fn.pieces[act[i]].slope.transpose();
            K(row, nvar - 1) = -1.0;
            rhs(row) = -fn.pieces[act[i]].intercept;
        }

        Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
        const Eigen::VectorXd sol = lu.solve(rhs);
        if ((K * sol - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) continue;

        const Eigen::VectorXd x = sol.head(d);
        const Eigen::VectorXd lambda = sol.segment(d, static_cast<Eigen::Index>(k));
        const double m = sol(nvar - 1);
        if (lambda.minCoeff() < -1e-10) continue;

        bool slack_ok = true;
        for (std::size_t j = 0; j < p; ++j) {
            if (mask & (1u << j)) continue;
            const double val = fn.pieces[j].slope.dot(x) + fn.pieces[j].intercept;
            if (val > m + 1e-9 * (1.0 + std::abs(m))) {
                slack_ok = false;
                break;
            }
        }
        if (slack_ok) return x;
    }
    throw EnumerationError("no active set yields a consistent prox solution");
}

Eigen::VectorXd prox_step(const PiecewiseConvexFn& fn, const Eigen::VectorXd& v) {
    return prox_weighted(fn, v, 1.0);
}

AdmmState admm_step(const CounterexampleInstance& inst) {
    const AdmmState& s = inst.state_k;
    AdmmState next;
    next.x = prox_step(inst.f, s.z - s.y);
    next.y = prox_step(inst.g, s.z - next.x);
    next.z = s.z - inst.gamma * (next.x + next.y);
    return next;
}

double measure_R(const AdmmState& state, const Eigen::VectorXd& z_star,
                 const GammaContext& ctx) {
    return (state.z - z_star).squaredNorm() + ctx.gamma * state.y.squaredNorm() +
           (ctx.gamma - 1.0) * (state.x + state.y).squaredNorm();
}

AdmmState admm_step_general(const PiecewiseConvexFn& f, const PiecewiseConvexFn& g,
                            const AdmmState& state, const GammaContext& ctx,
                            const ReplayConfig& cfg) {
    const double beta = cfg.penalty;
    const double c = cfg.coupling;
    if (!(beta > 0.0) || c == 0.0) {
        throw std::invalid_argument("replay needs penalty > 0 and nonzero coupling");
    }
    const Eigen::VectorXd b =
        cfg.offset.size() == 0 ? Eigen::VectorXd::Zero(state.z.size()).eval() : cfg.offset;

    // x-update: argmin f(x) + (beta/2)|c x + c y - b - z/beta|^2
    //         = prox at v = (b + z/beta)/c - y with weight beta c^2.
    const Eigen::VectorXd base = (b + state.z / beta) / c;
    AdmmState next;
    next.x = prox_weighted(f, base - state.y, beta * c * c);
    next.y = prox_weighted(g, base - next.x, beta * c * c);
    next.z = state.z - ctx.gamma * beta * (c * next.x + c * next.y - b);
    return next;
}

double measure_general(const AdmmState& state, const Eigen::VectorXd& z_star,
                       const Eigen::VectorXd& y_star, const GammaContext& ctx,
                       const ReplayConfig& cfg) {
    const double beta = cfg.penalty;
    const double c = cfg.coupling;
    const Eigen::VectorXd b =
        cfg.offset.size() == 0 ? Eigen::VectorXd::Zero(state.z.size()).eval() : cfg.offset;
    return (state.z - z_star).squaredNorm() +
           ctx.gamma * beta * beta * (c * (state.y - y_star)).squaredNorm() +
           (ctx.gamma - 1.0) * beta * beta * (c * state.x + c * state.y - b).squaredNorm();
}

}  // namespace admmpep
