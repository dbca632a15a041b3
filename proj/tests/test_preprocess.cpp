#include "doctest.h"

#include "polyunmix/preprocess.hpp"
#include "polyunmix/rng.hpp"

using namespace polyunmix;

namespace {

Eigen::MatrixXd random_matrix(long rows, long cols, std::uint64_t seed)
{
    Pcg32 rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
    return m;
}

} // namespace

TEST_CASE("sphere_normalize scales pixels to unit norm and is idempotent")
{
    SpectralDataset ds;
    ds.height = 1;
    ds.width = 2;
    ds.data.resize(2, 2);
    ds.data << 3.0, 4.0, 0.6, 0.8;
    const SpectralDataset out = sphere_normalize(ds);
    CHECK((out.data.row(0) - Eigen::RowVector2d(0.6, 0.8)).norm() < 1e-12);
    CHECK((out.data.row(1) - Eigen::RowVector2d(0.6, 0.8)).norm() < 1e-12);
    const SpectralDataset again = sphere_normalize(out);
    CHECK((again.data - out.data).norm() < 1e-12);
}

TEST_CASE("sphere_normalize rejects a zero spectrum with the pixel index")
{
    SpectralDataset ds;
    ds.height = 1;
    ds.width = 2;
    ds.data.resize(2, 3);
    ds.data.row(0) << 1.0, 0.0, 0.0;
    ds.data.row(1).setZero();
    CHECK_THROWS_WITH_AS(sphere_normalize(ds), doctest::Contains("zero spectrum at pixel 1"),
                         std::runtime_error);
}

TEST_CASE("projection basis is orthonormal and exact on low-rank data")
{
    // rank-2 data embedded in R^5
    const Eigen::MatrixXd factors = random_matrix(40, 2, 3);
    const Eigen::MatrixXd directions = random_matrix(2, 5, 4);
    const Eigen::MatrixXd data = factors * directions;

    const ProjectionBasis basis = fit_projection(data, 2);
    CHECK((basis.components.transpose() * basis.components - Eigen::MatrixXd::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    const Eigen::MatrixXd reduced = apply_projection(basis, data);
    const Eigen::MatrixXd reconstructed = reduced * basis.components.transpose();
    CHECK((reconstructed - data).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(basis.captured_energy == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("d' = d is an isometry")
{
    const Eigen::MatrixXd data = random_matrix(30, 4, 7);
    const ProjectionBasis basis = fit_projection(data, 4);
    const Eigen::MatrixXd reduced = apply_projection(basis, data);
    for (long i = 0; i < data.rows(); ++i)
        for (long j = i + 1; j < data.rows(); ++j) {
            const double orig = (data.row(i) - data.row(j)).norm();
            const double red = (reduced.row(i) - reduced.row(j)).norm();
            CHECK(red == doctest::Approx(orig).epsilon(1e-9));
        }
}

TEST_CASE("captured energy matches a Gram-matrix eigendecomposition oracle")
{
    const Eigen::MatrixXd data = random_matrix(100, 5, 9);
    for (int d_prime = 1; d_prime <= 5; ++d_prime) {
        const ProjectionBasis basis = fit_projection(data, d_prime);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(data.transpose() * data);
        const Eigen::VectorXd ev = eig.eigenvalues(); // ascending
        double top = 0.0;
        for (int k = 0; k < d_prime; ++k) top += ev(4 - k);
        const double want = top / ev.sum();
        CHECK(basis.captured_energy == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("projection is linear through the origin")
{
    const Eigen::MatrixXd data = random_matrix(20, 6, 13);
    const ProjectionBasis basis = fit_projection(data, 3);
    Eigen::MatrixXd with_zero(1, 6);
    with_zero.setZero();
    const Eigen::MatrixXd reduced = apply_projection(basis, with_zero);
    CHECK(reduced.cwiseAbs().maxCoeff() == 0.0);

    // projecting then lifting never increases norms
    const Eigen::MatrixXd red = apply_projection(basis, data);
    const Eigen::MatrixXd lifted = red * basis.components.transpose();
    for (long i = 0; i < data.rows(); ++i) CHECK(lifted.row(i).norm() <= data.row(i).norm() + 1e-12);
}

TEST_CASE("rank-deficient data pads the basis with an orthonormal complement")
{
    // rank 1 data, ask for 3 components
    const Eigen::MatrixXd factors = random_matrix(25, 1, 17);
    const Eigen::MatrixXd directions = random_matrix(1, 4, 18);
    const Eigen::MatrixXd data = factors * directions;
    const ProjectionBasis basis = fit_projection(data, 3);
    CHECK((basis.components.transpose() * basis.components - Eigen::MatrixXd::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-8);
}
