#include "doctest.h"

#include "oracles.hpp"
#include "polyunmix/geometry.hpp"
#include "polyunmix/rng.hpp"

#include <cmath>

using namespace polyunmix;

namespace {

// closed nonnegative quadrant of R^2: {-x <= 0, -y <= 0}
PolyhedralCone quadrant()
{
    std::vector<Halfspace> hs;
    hs.emplace_back(Eigen::Vector2d(-1.0, 0.0), 0.0);
    hs.emplace_back(Eigen::Vector2d(0.0, -1.0), 0.0);
    return PolyhedralCone(std::move(hs));
}

} // namespace

TEST_CASE("halfspace stores a unit normal with rescaled offset")
{
    Halfspace h(Eigen::Vector2d(3.0, 4.0), 10.0);
    CHECK(h.normal.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(h.offset == doctest::Approx(2.0)); // 10 / 5
    CHECK_THROWS(Halfspace(Eigen::Vector2d::Zero(), 0.0));
}

TEST_CASE("cone membership and hand-computed signed distances on the quadrant")
{
    const PolyhedralCone cone = quadrant();
    CHECK(cone.contains(Eigen::Vector2d(1.0, 2.0)));
    CHECK(cone.contains(Eigen::Vector2d::Zero()));
    CHECK_FALSE(cone.contains(Eigen::Vector2d(-0.1, 1.0)));

    // interior: minus the smallest margin
    CHECK(signed_distance(cone, Eigen::Vector2d(1.0, 2.0)) == doctest::Approx(-1.0));
    CHECK(signed_distance(cone, Eigen::Vector2d(5.0, 3.0)) == doctest::Approx(-3.0));
    // one violated halfspace: distance to the facet
    CHECK(signed_distance(cone, Eigen::Vector2d(-3.0, 4.0)) == doctest::Approx(3.0));
    // both violated: nearest point is the apex
    CHECK(signed_distance(cone, Eigen::Vector2d(-3.0, -4.0)) == doctest::Approx(5.0));
    // apex is on the boundary
    CHECK(signed_distance(cone, Eigen::Vector2d::Zero()) == doctest::Approx(0.0));
}

TEST_CASE("single-halfspace projection matches the closed form")
{
    Pcg32 rng(11);
    for (int t = 0; t < 50; ++t) {
        Eigen::VectorXd w(3), x(3);
        for (int k = 0; k < 3; ++k) {
            w(k) = rng.gaussian();
            x(k) = 3.0 * rng.gaussian();
        }
        if (w.norm() < 1e-6) continue;
        std::vector<Halfspace> hs{Halfspace(w, 0.0)};
        const Eigen::VectorXd p = project_onto_polyhedron(hs, x);
        const double viol = std::max(0.0, hs[0].normal.dot(x));
        const Eigen::VectorXd expected = x - viol * hs[0].normal;
        CHECK((p - expected).norm() < 1e-9);
    }
}

TEST_CASE("Dykstra projection satisfies the variational inequality")
{
    Pcg32 rng(23);
    for (int t = 0; t < 10; ++t) {
        const auto hs = oracles::random_cone(rng, 3, 3);
        Eigen::VectorXd x(3);
        for (int k = 0; k < 3; ++k) x(k) = 2.0 * rng.gaussian();
        const Eigen::VectorXd p = project_onto_polyhedron(hs, x);
        CHECK(oracles::in_cone(hs, p, 1e-8));
        int checked = 0;
        while (checked < 100) {
            Eigen::VectorXd q(3);
            for (int k = 0; k < 3; ++k) q(k) = 2.0 * rng.gaussian();
            if (!oracles::in_cone(hs, q)) continue;
            ++checked;
            CHECK((x - p).dot(q - p) <= 1e-6);
        }
    }
}

TEST_CASE("signed distance agrees with the grid+refinement oracle")
{
    Pcg32 rng(31);
    int done = 0;
    while (done < 25) {
        const int dim = 2 + static_cast<int>(rng.bounded(2));
        const auto hs = oracles::random_cone(rng, dim, dim);
        Eigen::VectorXd x(dim);
        for (int k = 0; k < dim; ++k) x(k) = rng.gaussian();
        if (x.norm() < 0.3) continue;
        ++done;
        const PolyhedralCone cone{std::vector<Halfspace>(hs)};
        const double got = signed_distance(cone, x);
        const double want = oracles::grid_signed_distance(hs, x);
        CHECK(std::abs(got - want) < 1e-4);
    }
}

TEST_CASE("signed distance is positively homogeneous on cones")
{
    Pcg32 rng(37);
    for (int t = 0; t < 20; ++t) {
        const auto hs = oracles::random_cone(rng, 3, 3);
        const PolyhedralCone cone{std::vector<Halfspace>(hs)};
        Eigen::VectorXd x(3);
        for (int k = 0; k < 3; ++k) x(k) = rng.gaussian();
        const double t_scale = std::exp(rng.uniform(-2.0, 2.0));
        const double base = signed_distance(cone, x);
        const double scaled = signed_distance(cone, Eigen::VectorXd(t_scale * x));
        CHECK(scaled == doctest::Approx(t_scale * base).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("simplex projection hand cases")
{
    // already on the simplex
    Eigen::Vector3d on(0.2, 0.3, 0.5);
    CHECK((project_onto_simplex(on) - on).norm() < 1e-12);
    // vertex saturation
    Eigen::Vector3d v(2.0, 0.0, 0.0);
    CHECK((project_onto_simplex(v) - Eigen::Vector3d(1.0, 0.0, 0.0)).norm() < 1e-12);
    // negative coordinate clipped
    Eigen::Vector3d neg(0.5, 0.5, -1.0);
    CHECK((project_onto_simplex(neg) - Eigen::Vector3d(0.5, 0.5, 0.0)).norm() < 1e-12);
    // near-zero input lands on the barycenter
    Eigen::Vector3d tiny = Eigen::Vector3d::Constant(1e-9);
    CHECK((project_onto_simplex(tiny) - Eigen::Vector3d::Constant(1.0 / 3.0)).norm() < 1e-6);
}

TEST_CASE("simplex projection output is feasible, idempotent and grid-optimal")
{
    Pcg32 rng(41);
    for (int t = 0; t < 60; ++t) {
        Eigen::VectorXd v(3);
        for (int k = 0; k < 3; ++k) v(k) = 2.0 * rng.gaussian();
        const Eigen::VectorXd p = project_onto_simplex(v);
        CHECK(p.minCoeff() >= 0.0);
        CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((project_onto_simplex(p) - p).norm() < 1e-12);
        // no simplex grid point does better (coarse grid in the unit test,
        // the full-resolution sweep runs in the acceptance suite)
        CHECK(oracles::simplex_grid_margin_r3(v, p, 1e-2) >= -1e-6);
    }
}
