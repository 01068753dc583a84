#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace admmpep {

/// One point-subgradient pair (x, g); dimensions must agree.
struct MonotonePoint {
    Eigen::VectorXd point;
    Eigen::VectorXd subgradient;
};

/// Max-affine closed proper convex function h(x) = max_i intercept_i + <slope_i, x>.
struct AffinePiece {
    Eigen::VectorXd slope;
    double intercept = 0.0;
};

struct PiecewiseConvexFn {
    Eigen::Index dim = 0;
    std::vector<AffinePiece> pieces;
};

void to_json(nlohmann::json& j, const PiecewiseConvexFn& fn);
void from_json(const nlohmann::json& j, PiecewiseConvexFn& fn);

/// A cycle i1 -> i2 -> ... -> ik -> i1 over point indices whose monotonicity
/// sum is negative.
struct CycleWitness {
    std::vector<std::size_t> indices;
    double cycle_sum;
};

struct MonotonicityCheck {
    bool monotone = false;
    std::optional<CycleWitness> witness;  ///< present iff not monotone
    explicit operator bool() const { return monotone; }
};

/// Exhaustively checks sum <x_i - x_{i+1}, g_i> >= -tolerance over every cycle
/// of every subset. Throws SizeError for more than 8 points.
MonotonicityCheck is_cyclically_monotone(const std::vector<MonotonePoint>& points,
                                         double tolerance);

/// Recomputes the monotonicity sum of a witness cycle against the point set.
double cycle_sum(const std::vector<MonotonePoint>& points,
                 const std::vector<std::size_t>& cycle);

/// Max-affine interpolant h with g_i in subdiff h(x_i) and h(x_1) = 0.
/// Intercept potentials come from longest-path relaxation over the complete
/// digraph with edge weight <g_i, x_j - x_i>; a detected positive cycle
/// (monotonicity failure) raises MonotonicityError.
PiecewiseConvexFn interpolant(const std::vector<MonotonePoint>& points);

double evaluate(const PiecewiseConvexFn& fn, const Eigen::VectorXd& x);

/// True iff g lies in the subdifferential of fn at x: convex-hull membership
/// over the slopes of the pieces active at x within tolerance*(1+|fn(x)|).
bool subdiff_contains(const PiecewiseConvexFn& fn, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& g, double tolerance);

/// c * fn for c > 0 (exact on pieces).
PiecewiseConvexFn scaled(const PiecewiseConvexFn& fn, double c);

/// fn(x - shift).
PiecewiseConvexFn translated(const PiecewiseConvexFn& fn, const Eigen::VectorXd& shift);

/// fn(x) + <w, x>.
PiecewiseConvexFn tilted(const PiecewiseConvexFn& fn, const Eigen::VectorXd& w);

}  // namespace admmpep
