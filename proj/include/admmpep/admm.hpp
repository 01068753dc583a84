#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include "admmpep/gamma_context.hpp"
#include "admmpep/interpolate.hpp"
#include "admmpep/sym_mat.hpp"

namespace admmpep {

/// One ADMM iterate triple; all three vectors share the reconstruction dimension.
struct AdmmState {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    Eigen::VectorXd z;
};

void to_json(nlohmann::json& j, const AdmmState& s);
void from_json(const nlohmann::json& j, AdmmState& s);

/// Explicit convex instance (coupling matrices are the identity, b = 0) whose
/// single replayed iteration increases the measure R.
struct CounterexampleInstance {
    PiecewiseConvexFn f;
    PiecewiseConvexFn g;
    int dimension = 2;
    Eigen::VectorXd z_star;      ///< fixed at the origin
    AdmmState state_k;           ///< normalized so measure_R(state_k) = 1
    AdmmState designated_next;   ///< the iterate the replay must reproduce
    double gamma = 0.0;
};

void to_json(nlohmann::json& j, const CounterexampleInstance& inst);
void from_json(const nlohmann::json& j, CounterexampleInstance& inst);

/// Rank-2 factor P (2x5) with P^T P = X, via the two dominant eigenpairs.
/// Throws RankError unless the third eigenvalue is below tolerance * lambda_max.
Eigen::Matrix<double, 2, 5> factor_rank2(const SymMat5& X, double tolerance);

/// General PSD factor: keeps every eigenpair above tolerance * lambda_max,
/// returning an r x 5 matrix P with P^T P = X up to the truncated mass.
Eigen::MatrixXd factor_psd(const SymMat5& X, double tolerance);

/// Reconstructs the instance from the analytic factor sqrt(alpha) * pbar.
/// Requires gamma above the golden ratio (the claimed region).
CounterexampleInstance build_instance(const GammaContext& ctx);

/// Reconstruction from an arbitrary r x 5 Grammian factor: columns become
/// x_k, y_k, x_next, y_next, z_k; f and g interpolate the induced
/// point-subgradient sets S1 and S2.
CounterexampleInstance build_instance_from_factor(const Eigen::MatrixXd& factor, double gamma);

/// argmin_x fn(x) + (1/2) |x - v|^2 by exhaustive active-set enumeration.
Eigen::VectorXd prox_step(const PiecewiseConvexFn& fn, const Eigen::VectorXd& v);

/// argmin_x fn(x) + (weight/2) |x - v|^2, weight > 0.
Eigen::VectorXd prox_weighted(const PiecewiseConvexFn& fn, const Eigen::VectorXd& v,
                              double weight);

/// One exact ADMM iteration on the instance (unit penalty, identity coupling):
/// x+ = prox_f(z - y), y+ = prox_g(z - x+), z+ = z - gamma (x+ + y+).
AdmmState admm_step(const CounterexampleInstance& inst);

/// Conventional measure R = |z - z_star|^2 + gamma |y|^2 + (gamma-1) |x + y|^2.
double measure_R(const AdmmState& state, const Eigen::VectorXd& z_star,
                 const GammaContext& ctx);

/// Generalized replay parameters: penalty beta, coupling c (A = B = c I), and
/// right-hand side b. The defaults reduce to admm_step / measure_R.
struct ReplayConfig {
    double penalty = 1.0;
    double coupling = 1.0;
    Eigen::VectorXd offset;  ///< b; empty means zero
};

AdmmState admm_step_general(const PiecewiseConvexFn& f, const PiecewiseConvexFn& g,
                            const AdmmState& state, const GammaContext& ctx,
                            const ReplayConfig& cfg);

/// R = |z - z_star|^2 + gamma beta^2 |c (y - y_star)|^2
///     + (gamma - 1) beta^2 |c x + c y - b|^2.
double measure_general(const AdmmState& state, const Eigen::VectorXd& z_star,
                       const Eigen::VectorXd& y_star, const GammaContext& ctx,
                       const ReplayConfig& cfg);

}  // namespace admmpep
