#include "polyunmix/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polyunmix {

Halfspace::Halfspace(Eigen::VectorXd w, double b)
{
    const double nrm = w.norm();
    if (nrm <= 1e-12) throw std::invalid_argument("Halfspace: near-zero normal");
    normal = w / nrm;
    offset = b / nrm;
}

PolyhedralCone::PolyhedralCone(std::vector<Halfspace> hs) : halfspaces(std::move(hs))
{
    if (halfspaces.empty()) throw std::invalid_argument("PolyhedralCone: no halfspaces");
    for (const auto& h : halfspaces)
        if (h.offset != 0.0)
            throw std::invalid_argument("PolyhedralCone: all offsets must be exactly 0");
}

bool PolyhedralCone::contains(const Eigen::VectorXd& x, double tol) const
{
    for (const auto& h : halfspaces)
        if (h.normal.dot(x) > tol) return false;
    return true;
}

Eigen::VectorXd project_onto_polyhedron(const std::vector<Halfspace>& halfspaces,
                                        const Eigen::VectorXd& x, double tol, int max_iter)
{
    const std::size_t k = halfspaces.size();
    if (k == 0) return x;
    if (k == 1) {
        const double v = halfspaces[0].normal.dot(x) - halfspaces[0].offset;
        return v > 0.0 ? Eigen::VectorXd(x - v * halfspaces[0].normal) : x;
    }

    Eigen::VectorXd z = x;
    std::vector<Eigen::VectorXd> increments(k, Eigen::VectorXd::Zero(x.size()));
    for (int iter = 0; iter < max_iter; ++iter) {
        const Eigen::VectorXd z_prev = z;
        for (std::size_t i = 0; i < k; ++i) {
            const Eigen::VectorXd y = z + increments[i];
            const double v = halfspaces[i].normal.dot(y) - halfspaces[i].offset;
            const Eigen::VectorXd projected = v > 0.0
                ? Eigen::VectorXd(y - v * halfspaces[i].normal)
                : y;
            increments[i] = y - projected;
            z = projected;
        }
        if ((z - z_prev).norm() < tol) return z;
    }
    throw std::runtime_error("project_onto_polyhedron: no convergence after " +
                             std::to_string(max_iter) + " cycles, last residual unknown > tol");
}

double signed_distance(const PolyhedralCone& cone, const Eigen::VectorXd& x)
{
    if (x.size() != cone.halfspaces.front().normal.size())
        throw std::invalid_argument("signed_distance: dimension mismatch");
    // Interior: distance to the complement is the smallest margin to any
    // bounding hyperplane, since the complement is a union of halfspace
    // complements.
    double max_value = -std::numeric_limits<double>::infinity();
    for (const auto& h : cone.halfspaces) max_value = std::max(max_value, h.normal.dot(x));
    if (max_value <= 0.0) return max_value; // = -min margin
    const Eigen::VectorXd p = project_onto_polyhedron(cone.halfspaces, x);
    return (x - p).norm();
}

Eigen::VectorXd project_onto_simplex(const Eigen::VectorXd& v)
{
    const long m = v.size();
    if (m == 0) throw std::invalid_argument("project_onto_simplex: empty vector");
    if (!v.allFinite()) throw std::invalid_argument("project_onto_simplex: non-finite input");
    std::vector<double> u(v.data(), v.data() + m);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0;
    double tau = 0.0;
    int rho = 0;
    for (long k = 0; k < m; ++k) {
        cumsum += u[static_cast<std::size_t>(k)];
        const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
        if (u[static_cast<std::size_t>(k)] - t > 0.0) {
            rho = static_cast<int>(k + 1);
            tau = t;
        }
    }
    (void)rho;
    Eigen::VectorXd a(m);
    for (long i = 0; i < m; ++i) a(i) = std::max(v(i) - tau, 0.0);
    return a;
}

} // namespace polyunmix
