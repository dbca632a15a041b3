// Independent reference computations used to freeze expected values in
// tests. Everything here is deliberately brute force and shares no code with
// the implementation paths it checks.
#ifndef POLYUNMIX_TEST_ORACLES_HPP
#define POLYUNMIX_TEST_ORACLES_HPP

#include "polyunmix/geometry.hpp"
#include "polyunmix/rng.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

namespace oracles {

inline bool in_cone(const std::vector<polyunmix::Halfspace>& hs, const Eigen::VectorXd& x,
                    double tol = 0.0)
{
    for (const auto& h : hs)
        if (h.normal.dot(x) > tol) return false;
    return true;
}

// Multi-level grid minimization: evaluate `objective` on a box grid around
// `start`, re-center on the best point and shrink. Sound for objectives with
// curvature in every direction (no flat valleys).
template <typename Objective>
inline double grid_minimize(const Eigen::VectorXd& start, double radius, Objective objective,
                            int per_axis = 16, int levels = 9)
{
    const long dim = start.size();
    Eigen::VectorXd center = start;
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_point = center;

    for (int level = 0; level < levels; ++level) {
        const double step = 2.0 * radius / per_axis;
        std::vector<int> idx(static_cast<std::size_t>(dim), 0);
        for (;;) {
            Eigen::VectorXd p(dim);
            for (long k = 0; k < dim; ++k)
                p(k) = center(k) - radius + step * idx[static_cast<std::size_t>(k)];
            const double d = objective(p);
            if (d < best) {
                best = d;
                best_point = p;
            }
            long k = 0;
            while (k < dim && ++idx[static_cast<std::size_t>(k)] > per_axis) {
                idx[static_cast<std::size_t>(k)] = 0;
                ++k;
            }
            if (k == dim) break;
        }
        center = best_point;
        radius = 2.5 * step;
    }
    return best;
}

// Interior case: the nearest complement point sits on one of the boundary
// hyperplanes. Searching the hyperplane itself (parametrized by an
// orthonormal basis of the normal's complement) keeps the objective strictly
// convex, so the grid refinement cannot drift along flat directions.
inline double grid_complement_distance(const std::vector<polyunmix::Halfspace>& hs,
                                       const Eigen::VectorXd& x)
{
    const long d = x.size();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& h : hs) {
        Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(h.normal).householderQ();
        const Eigen::MatrixXd tangent = q.rightCols(d - 1); // orthonormal, perp to the normal
        const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(d - 1);
        const double dist =
            grid_minimize(u0, std::max(1.2 * x.norm(), 1e-3),
                          [&](const Eigen::VectorXd& u) { return (x - tangent * u).norm(); });
        best = std::min(best, dist);
    }
    return best;
}

// Exact exterior distance by enumerating candidate active sets: the nearest
// point of the cone lies on some face, i.e. the projection of x onto the
// null space of the active constraints. Minimizing over feasible candidates
// reproduces the KKT solution to machine precision.
inline double exact_exterior_distance(const std::vector<polyunmix::Halfspace>& hs,
                                      const Eigen::VectorXd& x)
{
    const std::size_t k = hs.size();
    const long d = x.size();
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
        Eigen::VectorXd p;
        if (mask == 0) {
            p = x;
        } else {
            std::vector<int> act;
            for (std::size_t i = 0; i < k; ++i)
                if (mask & (1u << i)) act.push_back(static_cast<int>(i));
            Eigen::MatrixXd ws(static_cast<long>(act.size()), d);
            for (std::size_t r = 0; r < act.size(); ++r)
                ws.row(static_cast<long>(r)) = hs[static_cast<std::size_t>(act[r])].normal.transpose();
            const Eigen::MatrixXd pinv = ws.completeOrthogonalDecomposition().pseudoInverse();
            p = x - pinv * (ws * x);
        }
        if (in_cone(hs, p, 1e-10)) best = std::min(best, (x - p).norm());
    }
    return best;
}

inline double grid_signed_distance(const std::vector<polyunmix::Halfspace>& hs,
                                   const Eigen::VectorXd& x)
{
    return in_cone(hs, x) ? -grid_complement_distance(hs, x) : exact_exterior_distance(hs, x);
}

// Exhaustive check that no simplex grid point beats a candidate projection.
// Returns the margin (best grid distance - candidate distance); the
// candidate is optimal when the margin stays above -slack.
inline double simplex_grid_margin_r3(const Eigen::VectorXd& v, const Eigen::VectorXd& candidate,
                                     double grid_step = 1e-3)
{
    const double cand2 = (candidate - v).squaredNorm();
    double best2 = std::numeric_limits<double>::infinity();
    const int steps = static_cast<int>(std::lround(1.0 / grid_step));
    for (int i = 0; i <= steps; ++i) {
        const double a0 = i * grid_step;
        const double da0 = a0 - v(0);
        for (int j = 0; j <= steps - i; ++j) {
            const double a1 = j * grid_step;
            const double a2 = 1.0 - a0 - a1;
            const double d1 = a1 - v(1);
            const double d2 = a2 - v(2);
            const double d = da0 * da0 + d1 * d1 + d2 * d2;
            if (d < best2) best2 = d;
        }
    }
    return std::sqrt(best2) - std::sqrt(cand2);
}

// Projected subgradient descent on the no-intercept L1-hinge primal,
// tracking the best objective seen. Independent of the dual solver.
inline double svm_subgradient_best_objective(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                             double c_reg, long steps = 1000000)
{
    const long n = x.rows();
    const long d = x.cols();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    auto objective = [&](const Eigen::VectorXd& wv) {
        double obj = 0.5 * wv.squaredNorm();
        for (long i = 0; i < n; ++i)
            obj += c_reg * std::max(0.0, 1.0 - y[static_cast<std::size_t>(i)] * x.row(i).dot(wv));
        return obj;
    };
    double best = objective(w);
    for (long t = 1; t <= steps; ++t) {
        Eigen::VectorXd g = w;
        for (long i = 0; i < n; ++i) {
            const double yi = static_cast<double>(y[static_cast<std::size_t>(i)]);
            if (yi * x.row(i).dot(w) < 1.0) g -= c_reg * yi * x.row(i).transpose();
        }
        w -= (1.0 / static_cast<double>(t)) * g; // 1-strongly convex objective
        if (t % 100 == 0 || t > steps - 1000) best = std::min(best, objective(w));
    }
    return best;
}

// Ridge endmember solve via an explicit eigendecomposition of A A'.
inline Eigen::MatrixXd ridge_endmembers_eigen(const Eigen::MatrixXd& y, const Eigen::MatrixXd& a,
                                              double lambda)
{
    const Eigen::MatrixXd gram = a * a.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::MatrixXd v = eig.eigenvectors();
    Eigen::VectorXd inv = eig.eigenvalues();
    for (long i = 0; i < inv.size(); ++i) inv(i) = 1.0 / (inv(i) + lambda);
    return y * a.transpose() * v * inv.asDiagonal() * v.transpose();
}

// Best k-means inertia by enumerating every assignment of <= 16 points to 2
// clusters, each refined by Lloyd updates to a fixpoint.
inline double exhaustive_kmeans2_inertia(const Eigen::MatrixXd& data)
{
    const long n = data.rows();
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> assign(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) assign[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
        for (int iter = 0; iter < 50; ++iter) {
            Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(2, data.cols());
            Eigen::Vector2d counts = Eigen::Vector2d::Zero();
            for (long i = 0; i < n; ++i) {
                centroids.row(assign[static_cast<std::size_t>(i)]) += data.row(i);
                counts(assign[static_cast<std::size_t>(i)]) += 1.0;
            }
            if (counts(0) == 0.0 || counts(1) == 0.0) break;
            centroids.row(0) /= counts(0);
            centroids.row(1) /= counts(1);
            bool changed = false;
            for (long i = 0; i < n; ++i) {
                const int c = (data.row(i) - centroids.row(0)).squaredNorm() <=
                                      (data.row(i) - centroids.row(1)).squaredNorm()
                                  ? 0
                                  : 1;
                if (c != assign[static_cast<std::size_t>(i)]) {
                    assign[static_cast<std::size_t>(i)] = c;
                    changed = true;
                }
            }
            if (!changed) break;
        }
        Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(2, data.cols());
        Eigen::Vector2d counts = Eigen::Vector2d::Zero();
        for (long i = 0; i < n; ++i) {
            centroids.row(assign[static_cast<std::size_t>(i)]) += data.row(i);
            counts(assign[static_cast<std::size_t>(i)]) += 1.0;
        }
        if (counts(0) == 0.0 || counts(1) == 0.0) continue;
        centroids.row(0) /= counts(0);
        centroids.row(1) /= counts(1);
        double inertia = 0.0;
        for (long i = 0; i < n; ++i)
            inertia += (data.row(i) - centroids.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
        best = std::min(best, inertia);
    }
    return best;
}

// Random polyhedral cone through the origin with a nonempty interior,
// certified by a sampled strictly-interior direction.
inline std::vector<polyunmix::Halfspace> random_cone(polyunmix::Pcg32& rng, int dim,
                                                     int n_halfspaces)
{
    for (;;) {
        std::vector<polyunmix::Halfspace> hs;
        for (int i = 0; i < n_halfspaces; ++i) {
            Eigen::VectorXd w(dim);
            for (int k = 0; k < dim; ++k) w(k) = rng.gaussian();
            hs.emplace_back(w, 0.0);
        }
        for (int attempt = 0; attempt < 400; ++attempt) {
            Eigen::VectorXd x(dim);
            for (int k = 0; k < dim; ++k) x(k) = rng.gaussian();
            x.normalize();
            bool strict = true;
            for (const auto& h : hs)
                if (h.normal.dot(x) > -0.15) {
                    strict = false;
                    break;
                }
            if (strict) return hs;
        }
    }
}

} // namespace oracles

#endif
