#ifndef POLYUNMIX_GEOMETRY_HPP
#define POLYUNMIX_GEOMETRY_HPP

#include <Eigen/Dense>
#include <vector>

namespace polyunmix {

// Closed halfspace {x : <x,w> <= b}. Stored with a unit normal so that
// margins read directly as Euclidean distances.
struct Halfspace {
    Eigen::VectorXd normal;
    double offset = 0.0;

    Halfspace(Eigen::VectorXd w, double b);
};

// Intersection of halfspaces with offset 0: boundary hyperplanes all pass
// through the origin, so the cone always contains 0.
struct PolyhedralCone {
    std::vector<Halfspace> halfspaces;

    explicit PolyhedralCone(std::vector<Halfspace> hs);

    int dim() const { return static_cast<int>(halfspaces.front().normal.size()); }
    bool contains(const Eigen::VectorXd& x, double tol = 1e-12) const;
};

// Nearest point in the intersection of the halfspaces, via Dykstra's cyclic
// projection. Throws on non-convergence after max_iter cycles.
Eigen::VectorXd project_onto_polyhedron(const std::vector<Halfspace>& halfspaces,
                                        const Eigen::VectorXd& x, double tol = 1e-10,
                                        int max_iter = 10000);

// Positive outside (distance to the cone), negative inside (minus the
// distance to the complement, which for a cone is the smallest hyperplane
// margin).
double signed_distance(const PolyhedralCone& cone, const Eigen::VectorXd& x);

// Euclidean projection onto {a >= 0, sum a = 1} by sort-and-threshold.
Eigen::VectorXd project_onto_simplex(const Eigen::VectorXd& v);

} // namespace polyunmix

#endif
