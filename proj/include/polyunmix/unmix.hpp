#ifndef POLYUNMIX_UNMIX_HPP
#define POLYUNMIX_UNMIX_HPP

#include "polyunmix/partition.hpp"
#include "polyunmix/types.hpp"

namespace polyunmix {

// D[c][j] = signed distance of pixel j (rows of data) to region c.
Eigen::MatrixXd compute_distance_matrix(const ConePartition& partition,
                                        const Eigen::MatrixXd& data);

struct ReferenceBasis {
    Eigen::MatrixXd basis;           // m x m, column c = D column of the reference pixel
    std::vector<long> pixel_indices; // chosen reference pixel per class
};

// Column c: the D column of the class-c pixel with the most negative
// own-class distance. candidate_mask, when given, restricts the candidate
// set per class (pixels whose partition cell agrees with their label).
ReferenceBasis select_reference_basis(const Eigen::MatrixXd& distances,
                                      const std::vector<int>& labels,
                                      const std::vector<char>* candidate_mask = nullptr);

// D' = B^{-1} D via pivoted LU solve. Throws when cond(B) exceeds cond_limit
// unless the Tikhonov fallback is enabled.
Eigen::MatrixXd change_of_basis(const Eigen::MatrixXd& distances, const Eigen::MatrixXd& basis,
                                double cond_limit = 1e10, bool tikhonov_fallback = false);

// s = 1 / (2 * population std over all entries of D').
double saturation_default(const Eigen::MatrixXd& d_prime);

// Column j = simplex projection of s * D'[:,j].
Eigen::MatrixXd initial_abundances(const Eigen::MatrixXd& d_prime, double saturation);

// M = Y A'(A A' + lambda I)^{-1}; ridge solution of min ||Y - MA||^2 + l||M||^2.
Eigen::MatrixXd recover_endmembers(const Eigen::MatrixXd& y, const Eigen::MatrixXd& a_init,
                                   double lambda);

// A = (M'M + lambda I)^{-1} M'Y. Columns are NOT simplex-constrained.
Eigen::MatrixXd recover_abundances(const Eigen::MatrixXd& y, const Eigen::MatrixXd& m_hat,
                                   double lambda);

ClassificationMap dominant_labels(const Eigen::MatrixXd& abundances);

} // namespace polyunmix

#endif
