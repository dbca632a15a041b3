#ifndef POLYUNMIX_PARTITION_HPP
#define POLYUNMIX_PARTITION_HPP

#include "polyunmix/geometry.hpp"
#include "polyunmix/types.hpp"

#include <cstdint>

namespace polyunmix {

// Origin-passing hyperplane separating a class pair; class i sits on the
// <x,w> <= 0 side by majority vote.
struct SeparatingHyperplane {
    int class_i = 0;
    int class_j = 0;
    Eigen::VectorXd normal; // unit length
};

// The m retained arrangement cells as cones, indexed by class.
struct ConePartition {
    std::vector<SeparatingHyperplane> hyperplanes;
    std::vector<PolyhedralCone> regions;          // index c = class c
    std::vector<long> region_populations;         // pixels in each retained cell
    std::vector<std::vector<int>> region_patterns; // sign pattern (0 = nonpositive side)
    int m = 0;

    // Class of the retained cell containing x, or -1 when x falls in a
    // discarded cell.
    int region_of(const Eigen::VectorXd& x) const;
};

// Dual coordinate descent on the no-intercept L1-hinge SVM per unordered
// class pair, trained on a seeded subsample; normals unit-normalized.
std::vector<SeparatingHyperplane> train_pairwise_svm(const Eigen::MatrixXd& data,
                                                     const ClassificationMap& labels,
                                                     double c_reg = 1.0,
                                                     double sample_fraction = 0.20,
                                                     std::uint64_t seed = 0);

// Groups pixels by sign pattern over all hyperplanes, keeps the m most
// populated cells and maps cells to classes by maximum-weight assignment on
// the cell-vs-label contingency counts.
ConePartition build_partition(const std::vector<SeparatingHyperplane>& hyperplanes,
                              const Eigen::MatrixXd& data, const ClassificationMap& labels);

// No-intercept L1-hinge linear SVM for labels in {-1,+1}; exposed for the
// oracle cross-check. Returns the unnormalized weight vector.
Eigen::VectorXd svm_train_binary(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                 double c_reg, std::uint64_t seed, double gap_tol = 1e-6,
                                 int max_epochs = 20000);

// Primal objective 0.5*||w||^2 + C * sum hinge.
double svm_primal_objective(const Eigen::MatrixXd& x, const std::vector<int>& y,
                            const Eigen::VectorXd& w, double c_reg);

} // namespace polyunmix

#endif
