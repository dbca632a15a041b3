#ifndef POLYUNMIX_HUNGARIAN_HPP
#define POLYUNMIX_HUNGARIAN_HPP

#include <Eigen/Dense>
#include <vector>

namespace polyunmix {

// Minimum-cost perfect assignment on a square cost matrix (potentials-based
// O(n^3) method). Returns assignment[row] = column.
std::vector<int> hungarian_min_cost(const Eigen::MatrixXd& cost);

// Convenience wrapper for maximum-weight assignment.
std::vector<int> hungarian_max_weight(const Eigen::MatrixXd& weight);

} // namespace polyunmix

#endif
