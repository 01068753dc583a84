#include "admmpep/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "admmpep/errors.hpp"

namespace admmpep {

namespace {

void check_points(const std::vector<MonotonePoint>& points) {
    if (points.empty()) throw std::invalid_argument("point set must be nonempty");
    const Eigen::Index d = points.front().point.size();
    for (const auto& p : points) {
        if (p.point.size() != d || p.subgradient.size() != d) {
            throw std::invalid_argument("point/subgradient dimensions must agree");
        }
    }
}

}  // namespace

void to_json(nlohmann::json& j, const PiecewiseConvexFn& fn) {
    nlohmann::json pieces = nlohmann::json::array();
    for (const auto& p : fn.pieces) {
        std::vector<double> slope(p.slope.data(), p.slope.data() + p.slope.size());
        pieces.push_back({{"slope", slope}, {"intercept", p.intercept}});
    }
    j = nlohmann::json{{"dim", fn.dim}, {"pieces", pieces}};
}

void from_json(const nlohmann::json& j, PiecewiseConvexFn& fn) {
    fn.dim = j.at("dim").get<Eigen::Index>();
    fn.pieces.clear();
    for (const auto& jp : j.at("pieces")) {
        AffinePiece piece;
        const auto slope = jp.at("slope").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(slope.size()) != fn.dim) {
            throw std::invalid_argument("piece slope dimension mismatch in JSON");
        }
        piece.slope = Eigen::Map<const Eigen::VectorXd>(slope.data(), slope.size());
        piece.intercept = jp.at("intercept").get<double>();
        fn.pieces.push_back(std::move(piece));
    }
    if (fn.pieces.empty()) throw std::invalid_argument("function needs at least one piece");
}

double cycle_sum(const std::vector<MonotonePoint>& points,
                 const std::vector<std::size_t>& cycle) {
    double sum = 0.0;
    for (std::size_t t = 0; t < cycle.size(); ++t) {
        const auto& cur = points.at(cycle[t]);
        const auto& nxt = points.at(cycle[(t + 1) % cycle.size()]);
        sum += cur.subgradient.dot(cur.point - nxt.point);
    }
    return sum;
}

MonotonicityCheck is_cyclically_monotone(const std::vector<MonotonePoint>& points,
                                         double tolerance) {
    check_points(points);
    const std::size_t n = points.size();
    if (n > 8) throw SizeError("cyclic monotonicity enumeration limited to 8 points");

    MonotonicityCheck result;
    result.monotone = true;
    if (n == 1) return result;

    // Every subset, every cyclic order: the lowest subset index is pinned as
    // the cycle start, the remaining members are permuted.
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) members.push_back(i);
        }
        if (members.size() < 2) continue;
        std::vector<std::size_t> rest(members.begin() + 1, members.end());
        std::sort(rest.begin(), rest.end());
        do {
            std::vector<std::size_t> cycle;
            cycle.push_back(members.front());
            cycle.insert(cycle.end(), rest.begin(), rest.end());
            const double sum = cycle_sum(points, cycle);
            if (sum < -tolerance) {
                result.monotone = false;
                result.witness = CycleWitness{cycle, sum};
                return result;
            }
        } while (std::next_permutation(rest.begin(), rest.end()));
    }
    return result;
}

PiecewiseConvexFn interpolant(const std::vector<MonotonePoint>& points) {
    check_points(points);
    const std::size_t n = points.size();
    const Eigen::Index d = points.front().point.size();

    // Longest-path potentials from node 0 with edge weight w(i->j) = <g_i, x_j - x_i>.
    Eigen::MatrixXd w(n, n);
    double w_scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            w(i, j) = points[i].subgradient.dot(points[j].point - points[i].point);
            w_scale = std::max(w_scale, std::abs(w(i, j)));
        }
    }

    std::vector<double> v(n, -std::numeric_limits<double>::infinity());
    v[0] = 0.0;
    auto relax_round = [&]() {
        double best_gain = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(v[i])) continue;
            for (std::size_t j = 0; j < n; ++j) {
                const double cand = v[i] + w(i, j);
                if (cand > v[j]) {
                    best_gain = std::max(best_gain, cand - v[j]);
                    v[j] = cand;
                }
            }
        }
        return best_gain;
    };
    for (std::size_t round = 0; round + 1 < n; ++round) relax_round();
    // One extra round: any improvement beyond rounding noise means a positive
    // cycle, i.e. the set is not cyclically monotone.
    if (relax_round() > 1e-8 * (1.0 + w_scale)) {
        throw MonotonicityError("positive cycle detected; no convex interpolant exists");
    }

    PiecewiseConvexFn fn;
    fn.dim = d;
    fn.pieces.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        AffinePiece piece;
        piece.slope = points[i].subgradient;
        piece.intercept = v[i] - points[i].subgradient.dot(points[i].point);
        fn.pieces.push_back(std::move(piece));
    }
    return fn;
}

double evaluate(const PiecewiseConvexFn& fn, const Eigen::VectorXd& x) {
    if (fn.pieces.empty()) throw std::invalid_argument("function needs at least one piece");
    if (x.size() != fn.dim) throw std::invalid_argument("evaluation dimension mismatch");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : fn.pieces) best = std::max(best, p.intercept + p.slope.dot(x));
    return best;
}

bool subdiff_contains(const PiecewiseConvexFn& fn, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& g, double tolerance) {
    if (x.size() != fn.dim || g.size() != fn.dim) {
        throw std::invalid_argument("subdifferential query dimension mismatch");
    }
    const double h = evaluate(fn, x);
    const double eps = tolerance * (1.0 + std::abs(h));

    std::vector<const AffinePiece*> active;
    for (const auto& p : fn.pieces) {
        if (h - (p.intercept + p.slope.dot(x)) <= eps) active.push_back(&p);
    }
    // The subdifferential is the convex hull of the active slopes; membership
    // is decided by the least distance over all hull faces.
    const double accept = tolerance * (1.0 + g.norm());
    double best_dist = std::numeric_limits<double>::infinity();
    const std::size_t m = active.size();
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<const AffinePiece*> face;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (1u << i)) face.push_back(active[i]);
        }
        const std::size_t k = face.size();
        if (k == 1) {
            best_dist = std::min(best_dist, (face[0]->slope - g).norm());
            continue;
        }
        // Least squares over the affine hull of the face: minimize |S l - g|
        // subject to sum(l) = 1, then require l >= 0 for hull membership.
        Eigen::MatrixXd S(fn.dim, k);
        for (std::size_t i = 0; i < k; ++i) S.col(i) = face[i]->slope;
        Eigen::MatrixXd K(k + 1, k + 1);
        K.topLeftCorner(k, k) = S.transpose() * S;
        K.topRightCorner(k, 1).setOnes();
        K.bottomLeftCorner(1, k).setOnes();
        K(k, k) = 0.0;
        Eigen::VectorXd rhs(k + 1);
        rhs.head(k) = S.transpose() * g;
        rhs(k) = 1.0;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
        const Eigen::VectorXd sol = lu.solve(rhs);
        if ((K * sol - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) continue;
        const Eigen::VectorXd lambda = sol.head(k);
        if (lambda.minCoeff() < -1e-9) continue;
        best_dist = std::min(best_dist, (S * lambda - g).norm());
        if (best_dist <= accept) break;
    }
    return best_dist <= accept;
}

PiecewiseConvexFn scaled(const PiecewiseConvexFn& fn, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("scale factor must be positive");
    PiecewiseConvexFn out = fn;
    for (auto& p : out.pieces) {
        p.slope *= c;
        p.intercept *= c;
    }
    return out;
}

PiecewiseConvexFn translated(const PiecewiseConvexFn& fn, const Eigen::VectorXd& shift) {
    if (shift.size() != fn.dim) throw std::invalid_argument("translation dimension mismatch");
    PiecewiseConvexFn out = fn;
    for (auto& p : out.pieces) p.intercept -= p.slope.dot(shift);
    return out;
}

PiecewiseConvexFn tilted(const PiecewiseConvexFn& fn, const Eigen::VectorXd& w) {
    if (w.size() != fn.dim) throw std::invalid_argument("tilt dimension mismatch");
    PiecewiseConvexFn out = fn;
    for (auto& p : out.pieces) p.slope += w;
    return out;
}

}  // namespace admmpep
