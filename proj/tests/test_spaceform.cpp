#include <random>

#include "curvatura/errors.hpp"
#include "curvatura/spaceform.hpp"
#include "doctest.h"

using namespace curvatura;

TEST_SUITE("spaceform") {

TEST_CASE("sn values") {
    CHECK(sn(0, 2) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sn(1, M_PI / 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sn(-1, 1) == doctest::Approx(std::sinh(1.0)).epsilon(1e-14));
}

TEST_CASE("cn values and derivative relation") {
    CHECK(cn(0, 7.3) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cn(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
    // cn is the rho-derivative of sn: central-difference oracle, O(h^2).
    const double h = 1e-5;
    for (double c : {-1.0, 0.0, 1.0}) {
        for (double rho : {0.5, 1.0}) {
            const double fd = (sn(c, rho + h) - sn(c, rho - h)) / (2 * h);
            CHECK(std::abs(cn(c, rho) - fd) < 1e-9);
        }
    }
}

TEST_CASE("sn solves y'' + c y = 0") {
    const double h = 1e-3;
    for (double c : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        for (double rho : {0.3, 0.9, 1.2}) {
            const double ypp = (sn(c, rho + h) - 2 * sn(c, rho) + sn(c, rho - h)) / (h * h);
            CHECK(std::abs(ypp + c * sn(c, rho)) < 1e-6);
        }
    }
}

TEST_CASE("sn and cn are continuous in c near zero") {
    for (double rho : {0.5, 2.0}) {
        // Jump across the series/closed-form branch is bounded by the honest
        // dc sensitivity (dsn/dc ~ rho^3/6), no branch discontinuity on top.
        const double dc = 2e-12;
        CHECK(std::abs(sn(1e-8 + dc, rho) - sn(1e-8 - dc, rho)) < 2 * dc * rho * rho * rho);
        CHECK(std::abs(sn(1e-12, rho) - rho) < 1e-10);
        CHECK(std::abs(cn(1e-12, rho) - 1.0) < 1e-10);
    }
}

TEST_CASE("ambient inner product") {
    const SpaceForm e = SpaceForm::euclidean();
    CHECK(e.inner(Eigen::Vector4d(1, 0, 0, 0), Eigen::Vector4d(0, 1, 0, 0)) == 0.0);

    const SpaceForm h = SpaceForm::with_curvature(-1);
    const Eigen::Vector4d t(0, 0, 0, 1);
    CHECK(h.inner(t, t) == doctest::Approx(-1.0));

    const SpaceForm s = SpaceForm::with_curvature(1);
    const Eigen::Vector4d u(1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0, 0);
    CHECK(s.inner(u, u) == doctest::Approx(1.0));

    CHECK_THROWS_AS(e.inner_checked({1, 0}, {0, 1}), GeometryError);
    CHECK(e.inner_checked({1, 0, 0}, {0, 1, 0}) == 0.0);
}

TEST_CASE("cross product in R^3") {
    const SpaceForm e = SpaceForm::euclidean();
    const Eigen::Vector4d ex(1, 0, 0, 0), ey(0, 1, 0, 0);
    CHECK((e.cross(ex, ey) - Eigen::Vector4d(0, 0, 1, 0)).norm() == doctest::Approx(0.0));
    const Eigen::Vector4d u(0.3, -1.2, 0.7, 0);
    CHECK(e.cross(u, u).norm() == doctest::Approx(0.0));
    CHECK_THROWS_AS(e.cross({u}), GeometryError);
}

TEST_CASE("generalized cross product is ambient-orthogonal to its inputs") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(-1, 1);
    for (double c : {-1.0, 1.0}) {
        const SpaceForm sf = SpaceForm::with_curvature(c);
        for (int trial = 0; trial < 50; ++trial) {
            Eigen::Vector4d a, b, d;
            for (int i = 0; i < 4; ++i) {
                a[i] = dist(rng);
                b[i] = dist(rng);
                d[i] = dist(rng);
            }
            const Eigen::Vector4d w = sf.cross(a, b, d);
            const double mag = a.norm() * b.norm() * d.norm();
            CHECK(std::abs(sf.inner(w, a)) < 1e-12 * mag);
            CHECK(std::abs(sf.inner(w, b)) < 1e-12 * mag);
            CHECK(std::abs(sf.inner(w, d)) < 1e-12 * mag);
        }
        CHECK_THROWS_AS(sf.cross({Eigen::Vector4d::Ones(), Eigen::Vector4d::Ones()}),
                        GeometryError);
    }
}

TEST_CASE("cross product with the position stays tangent to the model") {
    for (double c : {-1.0, 1.0}) {
        const SpaceForm sf = SpaceForm::with_curvature(c);
        const Eigen::Vector4d x = sf.base_point();
        REQUIRE(sf.on_model(x));
        // Two tangent vectors at the base point.
        const Eigen::Vector4d t1(1, 0, 0, 0), t2(0, 1, 0, 0);
        const Eigen::Vector4d w = sf.cross(t1, t2, x);
        CHECK(std::abs(sf.inner(w, x)) < 1e-14);
    }
}

TEST_CASE("ball geometry") {
    const SpaceForm e = SpaceForm::euclidean();
    const BallGeometry b0 = ball_geometry(e, 1.0);
    CHECK(b0.boundary_second_fundamental == doctest::Approx(-1.0));

    const SpaceForm h = SpaceForm::with_curvature(-1);
    const BallGeometry bh = ball_geometry(h, 1.0);
    CHECK(bh.boundary_geodesic_curvature ==
          doctest::Approx(std::cosh(1.0) / std::sinh(1.0)).epsilon(1e-12));

    const SpaceForm s = SpaceForm::with_curvature(1);
    CHECK_THROWS_AS(ball_geometry(s, M_PI / 2), GeometryError);
    CHECK_THROWS_AS(ball_geometry(e, -0.5), GeometryError);

    for (double c : {-2.0, -1.0, 1.0}) {
        const SpaceForm sf = SpaceForm::with_curvature(c);
        const BallGeometry bg = ball_geometry(sf, 0.7);
        CHECK(bg.boundary_second_fundamental + bg.boundary_geodesic_curvature == 0.0);
    }
}

TEST_CASE("geodesic exponential stays on the model") {
    for (double c : {-1.0, 0.5, 1.0}) {
        const SpaceForm sf = SpaceForm::with_curvature(c);
        const Eigen::Vector4d x = sf.base_point();
        const Eigen::Vector4d w(0.3, -0.2, 0.4, 0);
        const Eigen::Vector4d y = sf.exponential(x, w);
        CHECK(sf.model_residual(y) < 1e-12);
        CHECK(sf.distance(x, y) == doctest::Approx(sf.norm(w)).epsilon(1e-10));
    }
}

} // TEST_SUITE
