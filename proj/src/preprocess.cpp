#include "polyunmix/preprocess.hpp"

#include <iostream>
#include <stdexcept>

namespace polyunmix {

SpectralDataset sphere_normalize(const SpectralDataset& data)
{
    SpectralDataset out = data;
    for (long i = 0; i < out.data.rows(); ++i) {
        const double nrm = out.data.row(i).norm();
        if (nrm <= 1e-12)
            throw std::runtime_error("sphere_normalize: zero spectrum at pixel " +
                                     std::to_string(i));
        out.data.row(i) /= nrm;
    }
    return out;
}

ProjectionBasis fit_projection(const Eigen::MatrixXd& data, int d_prime)
{
    const long n = data.rows();
    const long d = data.cols();
    if (d_prime < 1 || d_prime > d)
        throw std::invalid_argument("fit_projection: d' must satisfy 1 <= d' <= d");
    if (n < d_prime)
        throw std::invalid_argument("fit_projection: need at least d' samples");

    // Right singular directions of the uncentered data via the d x d Gram
    // matrix; eigenvectors for (near-)zero eigenvalues provide the
    // orthonormal complement when the data is rank deficient.
    const Eigen::MatrixXd gram = data.transpose() * data;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("fit_projection: eigendecomposition failed");

    const Eigen::VectorXd evals = eig.eigenvalues(); // ascending
    const Eigen::MatrixXd evecs = eig.eigenvectors();

    double total = 0.0;
    for (long i = 0; i < d; ++i) total += std::max(evals(i), 0.0);

    ProjectionBasis basis;
    basis.components.resize(d, d_prime);
    double captured = 0.0;
    int rank_in_basis = 0;
    const double rank_tol = 1e-12 * std::max(evals(d - 1), 0.0);
    for (int k = 0; k < d_prime; ++k) {
        const long src = d - 1 - k;
        basis.components.col(k) = evecs.col(src);
        const double ev = std::max(evals(src), 0.0);
        captured += ev;
        if (ev > rank_tol) ++rank_in_basis;
    }
    if (rank_in_basis < d_prime)
        std::cerr << "warning: fit_projection: data rank " << rank_in_basis << " < d'="
                  << d_prime << "; basis padded with orthonormal complement\n";
    basis.captured_energy = total > 0.0 ? captured / total : 0.0;
    return basis;
}

Eigen::MatrixXd apply_projection(const ProjectionBasis& basis, const Eigen::MatrixXd& data)
{
    if (data.cols() != basis.components.rows())
        throw std::invalid_argument("apply_projection: dimension mismatch");
    return data * basis.components;
}

} // namespace polyunmix
