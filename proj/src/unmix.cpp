#include "polyunmix/unmix.hpp"

#include "polyunmix/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace polyunmix {

Eigen::MatrixXd compute_distance_matrix(const ConePartition& partition,
                                        const Eigen::MatrixXd& data)
{
    const int m = partition.m;
    const long n = data.rows();
    Eigen::MatrixXd d(m, n);
    for (long j = 0; j < n; ++j) {
        const Eigen::VectorXd x = data.row(j).transpose();
        for (int c = 0; c < m; ++c) {
            try {
                d(c, j) = signed_distance(partition.regions[static_cast<std::size_t>(c)], x);
            } catch (const std::exception& e) {
                throw std::runtime_error("compute_distance_matrix: pixel " + std::to_string(j) +
                                         ", region " + std::to_string(c) + ": " + e.what());
            }
        }
    }
    return d;
}

ReferenceBasis select_reference_basis(const Eigen::MatrixXd& distances,
                                      const std::vector<int>& labels,
                                      const std::vector<char>* candidate_mask)
{
    const long m = distances.rows();
    const long n = distances.cols();
    if (static_cast<long>(labels.size()) != n)
        throw std::invalid_argument("select_reference_basis: label length mismatch");

    ReferenceBasis out;
    out.basis.resize(m, m);
    out.pixel_indices.assign(static_cast<std::size_t>(m), -1);
    for (long c = 0; c < m; ++c) {
        long best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        // first pass honors the mask, second pass falls back to labels alone
        for (int pass = 0; pass < 2 && best < 0; ++pass) {
            for (long j = 0; j < n; ++j) {
                if (labels[static_cast<std::size_t>(j)] != c) continue;
                if (pass == 0 && candidate_mask && !(*candidate_mask)[static_cast<std::size_t>(j)])
                    continue;
                if (distances(c, j) < best_d) {
                    best_d = distances(c, j);
                    best = j;
                }
            }
        }
        if (best < 0)
            throw std::runtime_error("select_reference_basis: empty class " + std::to_string(c));
        out.pixel_indices[static_cast<std::size_t>(c)] = best;
        out.basis.col(c) = distances.col(best);
    }
    return out;
}

Eigen::MatrixXd change_of_basis(const Eigen::MatrixXd& distances, const Eigen::MatrixXd& basis,
                                double cond_limit, bool tikhonov_fallback)
{
    const long m = basis.rows();
    if (basis.cols() != m || distances.rows() != m)
        throw std::invalid_argument("change_of_basis: shape mismatch");

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis);
    const double smin = svd.singularValues()(m - 1);
    const double smax = svd.singularValues()(0);
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (cond > cond_limit) {
        if (!tikhonov_fallback)
            throw std::runtime_error(
                "ill-conditioned reference basis (cond " + std::to_string(cond) +
                "); enable the Tikhonov fallback or supply a better segmentation");
        const double eps = 1e-8 * (basis.transpose() * basis).trace() / static_cast<double>(m);
        const Eigen::MatrixXd gram =
            basis.transpose() * basis + eps * Eigen::MatrixXd::Identity(m, m);
        return gram.ldlt().solve(basis.transpose() * distances);
    }
    return basis.partialPivLu().solve(distances);
}

double saturation_default(const Eigen::MatrixXd& d_prime)
{
    const long count = d_prime.size();
    if (count < 2) throw std::invalid_argument("saturation_default: need at least 2 entries");
    const double mean = d_prime.sum() / static_cast<double>(count);
    double var = 0.0;
    for (long j = 0; j < d_prime.cols(); ++j)
        for (long i = 0; i < d_prime.rows(); ++i) {
            const double diff = d_prime(i, j) - mean;
            var += diff * diff;
        }
    var /= static_cast<double>(count); // population variance
    const double sd = std::sqrt(var);
    if (sd <= 0.0) throw std::runtime_error("degenerate distance spread: std(D') = 0");
    return 1.0 / (2.0 * sd);
}

Eigen::MatrixXd initial_abundances(const Eigen::MatrixXd& d_prime, double saturation)
{
    if (!(saturation > 0.0)) throw std::invalid_argument("initial_abundances: s must be > 0");
    Eigen::MatrixXd a(d_prime.rows(), d_prime.cols());
    for (long j = 0; j < d_prime.cols(); ++j)
        a.col(j) = project_onto_simplex(saturation * d_prime.col(j));
    return a;
}

namespace {

void check_spd_solve(const Eigen::LDLT<Eigen::MatrixXd>& ldlt, double lambda, const char* op)
{
    if (ldlt.info() != Eigen::Success || (lambda == 0.0 && !ldlt.isPositive()))
        throw std::runtime_error(std::string(op) +
                                 ": singular system at lambda=0; retry with lambda > 0");
}

} // namespace

Eigen::MatrixXd recover_endmembers(const Eigen::MatrixXd& y, const Eigen::MatrixXd& a_init,
                                   double lambda)
{
    if (lambda < 0.0) throw std::invalid_argument("recover_endmembers: lambda must be >= 0");
    if (y.cols() != a_init.cols())
        throw std::invalid_argument("recover_endmembers: pixel count mismatch");
    const long m = a_init.rows();
    const Eigen::MatrixXd gram =
        a_init * a_init.transpose() + lambda * Eigen::MatrixXd::Identity(m, m);
    if (lambda == 0.0) {
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
        if (!lu.isInvertible())
            throw std::runtime_error("recover_endmembers: singular A*A' at lambda=0; "
                                     "retry with lambda > 0");
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt = gram.ldlt();
    check_spd_solve(ldlt, lambda, "recover_endmembers");
    // M' solves (AA' + lI) M' = A Y', so M = Y A' (AA' + lI)^{-1}
    return ldlt.solve(a_init * y.transpose()).transpose();
}

Eigen::MatrixXd recover_abundances(const Eigen::MatrixXd& y, const Eigen::MatrixXd& m_hat,
                                   double lambda)
{
    if (lambda < 0.0) throw std::invalid_argument("recover_abundances: lambda must be >= 0");
    if (y.rows() != m_hat.rows())
        throw std::invalid_argument("recover_abundances: band count mismatch");
    const long m = m_hat.cols();
    const Eigen::MatrixXd gram =
        m_hat.transpose() * m_hat + lambda * Eigen::MatrixXd::Identity(m, m);
    if (lambda == 0.0) {
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
        if (!lu.isInvertible())
            throw std::runtime_error("recover_abundances: singular M'M at lambda=0; "
                                     "retry with lambda > 0");
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt = gram.ldlt();
    check_spd_solve(ldlt, lambda, "recover_abundances");
    return ldlt.solve(m_hat.transpose() * y);
}

ClassificationMap dominant_labels(const Eigen::MatrixXd& abundances)
{
    ClassificationMap map;
    map.m = static_cast<int>(abundances.rows());
    map.labels = argmax_labels(abundances);
    return map;
}

} // namespace polyunmix
