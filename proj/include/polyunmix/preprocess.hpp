#ifndef POLYUNMIX_PREPROCESS_HPP
#define POLYUNMIX_PREPROCESS_HPP

#include "polyunmix/types.hpp"

namespace polyunmix {

// Top right-singular directions of the raw (uncentered) data matrix. No mean
// subtraction: the reduction must keep the origin fixed so that cone apices
// stay at 0 after preprocessing.
struct ProjectionBasis {
    Eigen::MatrixXd components; // d x d', orthonormal columns
    double captured_energy = 0.0;
};

// Scales every pixel spectrum to unit L2 norm. Throws on a zero spectrum.
SpectralDataset sphere_normalize(const SpectralDataset& data);

ProjectionBasis fit_projection(const Eigen::MatrixXd& data, int d_prime);

// Y' = Y * components (n x d').
Eigen::MatrixXd apply_projection(const ProjectionBasis& basis, const Eigen::MatrixXd& data);

} // namespace polyunmix

#endif
