#include <random>

#include "curvatura/catalog.hpp"
#include "curvatura/errors.hpp"
#include "curvatura/profile.hpp"
#include "curvatura/surface.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace curvatura;

namespace {

ParametricPatch unit_sphere_patch(double r = 1.0, bool inward = true) {
    return make_sphere_geographic(r, Eigen::Vector3d::Zero(),
                                  Domain::rectangle(-2.5, 2.5, -1.1, 1.1), inward);
}

} // namespace

TEST_SUITE("surface") {

TEST_CASE("round sphere jets, inward normal") {
    const double r = 2.0;
    const ParametricPatch sphere = unit_sphere_patch(r, true);
    const SurfaceJet j = evaluate_jet(sphere, 0.4, -0.3);
    CHECK(j.kappa1 == doctest::Approx(1 / r).epsilon(1e-12));
    CHECK(j.kappa2 == doctest::Approx(1 / r).epsilon(1e-12));
    CHECK(j.H1 == doctest::Approx(1 / r).epsilon(1e-12));
    CHECK(j.H2 == doctest::Approx(1 / (r * r)).epsilon(1e-12));
    CHECK(j.umbilicity_defect < 1e-12);
    CHECK((j.newton_on - (1 / r) * Eigen::Matrix2d::Identity()).norm() < 1e-12);
    CHECK(j.normal.head<3>().dot(j.position.head<3>()) < 0); // inward
    CHECK(std::abs(j.normal.norm() - 1) < 1e-14);
    CHECK(std::abs(j.normal.dot(j.tangent_u)) < 1e-13 * j.tangent_u.norm());
    CHECK(std::abs(j.normal.dot(j.tangent_v)) < 1e-13 * j.tangent_v.norm());
    CHECK(j.gauss_intrinsic == doctest::Approx(j.H2).epsilon(1e-8));
    const auto res = verify_newton_identities(j);
    CHECK(res[0] < 1e-12);
    CHECK(res[1] < 1e-12);
    CHECK(res[2] < 1e-12);
}

TEST_CASE("flat patch is totally geodesic") {
    const ParametricPatch disk = make_plane_disk(1.5);
    const SurfaceJet j = evaluate_jet(disk, 0.3, 0.7);
    CHECK(j.shape.norm() < 1e-14);
    CHECK(j.H2 == 0.0);
    CHECK(std::abs(j.kappa1) < 1e-14);
    CHECK(j.newton_coord().norm() < 1e-13);
}

TEST_CASE("ellipsoid jets against the level-set oracle") {
    const double a = 2.0, b = 1.5, c = 1.0;
    const ParametricPatch ell =
        make_ellipsoid(a, b, c, Domain::rectangle(-M_PI / 2, 3 * M_PI / 2, -1.25, 1.25));
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> du(-M_PI / 2 + 0.1, 3 * M_PI / 2 - 0.1),
        dv(-1.2, 1.2);
    for (int trial = 0; trial < 100; ++trial) {
        const double u = du(rng), v = dv(rng);
        const SurfaceJet j = evaluate_jet(ell, u, v);
        const auto res = verify_newton_identities(j);
        CHECK(res[0] < 1e-9);
        CHECK(res[1] < 1e-9);
        CHECK(res[2] < 1e-9);
        CHECK(std::abs(j.gauss_intrinsic - j.H2) < 1e-8);

        double k1, k2;
        oracles::quadric_level_set_curvatures(Eigen::Vector3d(a, b, c), j.position.head<3>(),
                                              k1, k2);
        // The oracle is oriented by the outward normal; match orientations.
        const Eigen::Vector3d grad = j.position.head<3>().cwiseQuotient(
            Eigen::Vector3d(a * a, b * b, c * c));
        const double orient = j.normal.head<3>().dot(grad) > 0 ? 1.0 : -1.0;
        double ok1 = orient * k1, ok2 = orient * k2;
        if (ok1 < ok2) std::swap(ok1, ok2);
        CHECK(j.kappa1 == doctest::Approx(ok1).epsilon(1e-8));
        CHECK(j.kappa2 == doctest::Approx(ok2).epsilon(1e-8));
    }
}

TEST_CASE("Newton identities hold for synthetic shape operators") {
    std::mt19937 rng(31337);
    std::uniform_real_distribution<double> d(-2, 2);
    for (int trial = 0; trial < 200; ++trial) {
        SurfaceJet j;
        j.metric = Eigen::Matrix2d::Identity();
        Eigen::Matrix2d A;
        const double a = d(rng), b = d(rng), cdiag = d(rng);
        A << a, b, b, cdiag;
        j.shape = A;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(A);
        j.kappa1 = eig.eigenvalues()[1];
        j.kappa2 = eig.eigenvalues()[0];
        j.H1 = 0.5 * (j.kappa1 + j.kappa2);
        j.H2 = j.kappa1 * j.kappa2;
        const auto res = verify_newton_identities(j);
        CHECK(res[0] < 1e-12);
        CHECK(res[1] < 1e-12);
        CHECK(res[2] < 1e-12);
    }
}

TEST_CASE("orient_for_positivity") {
    const ParametricPatch outward = unit_sphere_patch(1.0, false);
    CHECK(evaluate_jet(outward, 0.2, 0.1).kappa1 < 0);
    const ParametricPatch fixed = orient_for_positivity(outward);
    CHECK(evaluate_jet(fixed, 0.2, 0.1).kappa2 > 0);

    // Idempotence: an already positive patch comes back unchanged.
    const ParametricPatch again = orient_for_positivity(fixed);
    CHECK(again.orientation_sign() == fixed.orientation_sign());

    const ParametricPatch saddle = make_monkey_saddle(1.0, 0.8);
    CHECK_THROWS_AS(orient_for_positivity(saddle), GeometryError);
}

TEST_CASE("boundary jet of a flat disk") {
    const double r = 2.0;
    const ParametricPatch disk = make_plane_disk(r);
    const BoundaryJet bj = evaluate_boundary_jet(disk, 0, 0.7);
    CHECK(bj.kappa_g == doctest::Approx(1 / r).epsilon(1e-10));
    CHECK(std::abs(bj.II_nn) < 1e-12);
    CHECK(std::abs(bj.II_nt) < 1e-12);
    // Outward conormal is radial.
    CHECK(bj.conormal.head<3>().normalized().dot(bj.position.head<3>().normalized()) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(bj.conormal.dot(bj.tangent)) < 1e-12);
}

TEST_CASE("boundary jet errors at rectangle corners") {
    const ParametricPatch sphere = unit_sphere_patch();
    CHECK_THROWS_AS(evaluate_boundary_jet(sphere, 0, 0.0), GeometryError);
    CHECK_NOTHROW(evaluate_boundary_jet(sphere, 0, 0.5));
}

TEST_CASE("free-boundary cap in the unit ball (c = 0)") {
    const SpaceForm sf = SpaceForm::euclidean();
    const CapInBall cap = make_cap_in_ball(sf, 1.0, 1.0);
    CHECK(cap.center_distance == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(cap.boundary_circle_radius == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));

    // Umbilical with kappa = 1/r everywhere, positively oriented.
    for (double u : {-0.5, 0.0, 0.6}) {
        const SurfaceJet j = evaluate_jet(cap.patch, u, 0.3);
        CHECK(j.umbilicity_defect < 1e-10);
        CHECK(j.kappa2 > 0);
    }

    // Boundary circle on the ball, orthogonal intersection, kappa_g = 1.
    for (double s : {0.0, 1.0, 2.5, 5.0}) {
        const BoundaryJet bj = evaluate_boundary_jet(cap.patch, 0, s);
        CHECK(bj.position.head<3>().norm() == doctest::Approx(1.0).epsilon(1e-12));
        const Eigen::Vector3d eta_bar = bj.position.head<3>().normalized();
        CHECK((bj.conormal.head<3>() - eta_bar).norm() < 1e-8);
        CHECK(bj.kappa_g == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("free-boundary caps in curved models") {
    for (double c : {-1.0, 1.0}) {
        const SpaceForm sf = SpaceForm::with_curvature(c);
        const double R = c > 0 ? 0.7 : 1.0;
        const double r = c > 0 ? 0.5 : 0.8;
        const CapInBall cap = make_cap_in_ball(sf, R, r);
        const double expected_kg = cn(c, R) / sn(c, R);

        for (double s : {0.3, 2.0, 4.4}) {
            const BoundaryJet bj = evaluate_boundary_jet(cap.patch, 0, s);
            CHECK(sf.model_residual(bj.position) < 1e-10);
            CHECK(sf.distance(bj.position, sf.base_point()) ==
                  doctest::Approx(R).epsilon(1e-10));
            // Free boundary: conormal equals the ball's outward normal.
            const Eigen::Vector4d eta_bar =
                (cn(c, R) * bj.position - sf.base_point()) / sn(c, R);
            CHECK((bj.conormal - eta_bar).norm() < 1e-8);
            CHECK(bj.kappa_g == doctest::Approx(expected_kg).epsilon(1e-8));
        }
        for (double u : {-0.4, 0.2}) {
            const SurfaceJet j = evaluate_jet(cap.patch, u, 0.1);
            CHECK(j.umbilicity_defect < 1e-10);
            CHECK(std::abs(j.gauss_intrinsic - j.H2 - c) < 1e-8);
        }
    }
}

TEST_CASE("hemisphere on a plane has geodesic boundary") {
    const ParametricPatch hemi = make_cap_on_plane(1.0, 0.0);
    const BoundaryJet bj = evaluate_boundary_jet(hemi, 0, 1.2);
    CHECK(std::abs(bj.position[2]) < 1e-12);
    CHECK(std::abs(bj.kappa_g) < 1e-8);
}

TEST_CASE("rotational profile reproduces the sphere") {
    const SpaceForm sf = SpaceForm::euclidean();
    ShootingOptions opts;
    opts.max_iterations = 2;
    const RotationalProfile prof = rotational_h2_profile(sf, 1.0, 1.0, M_PI / 2, opts);
    // rho(0) = 1, psi(0) = pi/2 with H2 = 1 is the unit circle rho = cos s,
    // z = sin s about (0, 0): rho^2 + z^2 = 1 along the whole trajectory.
    for (const auto& smp : prof.samples)
        CHECK(std::abs(smp.rho * smp.rho + smp.z * smp.z - 1.0) < 1e-8);
    CHECK(prof.closed_at_pole);
}

TEST_CASE("rotational profile: constant H2 along the surface") {
    const SpaceForm sf = SpaceForm::euclidean();
    const double H2 = 1.0;
    ShootingOptions opts;
    opts.max_iterations = 2;
    const RotationalProfile prof = rotational_h2_profile(sf, H2, 0.75, M_PI / 2, opts);
    const double span = prof.s_max - prof.s_min;
    const ParametricPatch patch =
        make_rotational_patch(prof, prof.s_min + 0.15 * span, prof.s_max - 0.15 * span);
    const Domain& dom = patch.domain();
    for (double fu : {0.1, 0.35, 0.62, 0.9}) {
        for (double fv : {0.2, 0.7}) {
            const double s = dom.u0 + fu * (dom.u1 - dom.u0);
            const double u = dom.v0 + fv * (dom.v1 - dom.v0);
            const SurfaceJet j = evaluate_jet(patch, s, u);
            CHECK(std::abs(j.H2 - H2) < 1e-6);
            const auto res = verify_newton_identities(j);
            CHECK(res[0] < 1e-10);
            CHECK(res[1] < 1e-10);
            CHECK(res[2] < 1e-10);
        }
    }
}

TEST_CASE("slab shooting reports honest failure away from the sphere family") {
    const SpaceForm sf = SpaceForm::euclidean();
    const RotationalProfile prof = rotational_h2_profile(sf, 1.0, 0.8);
    CHECK(!prof.shooting_converged);
    CHECK(!prof.outcome.empty());
    CHECK(prof.vertical_tangent_heights.size() < 2);
}

TEST_CASE("finite-difference fallback matches analytic jets") {
    const double r = 1.3;
    auto fn = [r](double u, double v) {
        return Eigen::Vector4d(r * std::cos(u) * std::cos(v), r * std::sin(u) * std::cos(v),
                               r * std::sin(v), 0);
    };
    ParametricPatch fd(SpaceForm::euclidean(), Domain::rectangle(-1, 1, -0.8, 0.8),
                       std::make_shared<FiniteDifferenceMap>(fn, 3, 1e-4));
    const ParametricPatch exact = make_sphere_geographic(
        r, Eigen::Vector3d::Zero(), Domain::rectangle(-1, 1, -0.8, 0.8), false);
    const SurfaceJet jf = evaluate_jet(fd, 0.3, -0.2);
    const SurfaceJet je = evaluate_jet(exact, 0.3, -0.2);
    CHECK((jf.metric - je.metric).norm() < 1e-8);
    CHECK((jf.second_ff - je.second_ff).norm() < 1e-6);
    CHECK(std::abs(jf.H2 - je.H2) < 1e-6);
    CHECK(std::isnan(jf.gauss_intrinsic)); // order-2 supplier: no Brioschi
}

TEST_CASE("analytic L1 reproduces the coordinate identities on a sphere") {
    // For a unit sphere in R^3 (c = 0): L1 phi = 2 H2 eta and
    // L1 eta = -tr(P1 A^2) eta (constant H2).
    const ParametricPatch sphere = unit_sphere_patch(1.0, true);
    const ExtendedJet ex = evaluate_extended(sphere, 0.5, 0.2);
    for (int k = 0; k < 3; ++k) {
        const double lhs_phi = ex.L1(ex.pos[k]);
        const double rhs_phi = 2 * ex.jet.H2 * ex.jet.normal[k];
        CHECK(std::abs(lhs_phi - rhs_phi) < 1e-9);

        const double lhs_eta = ex.L1(ex.normal[k]);
        const double rhs_eta = -2 * ex.jet.H1 * ex.jet.H2 * ex.jet.normal[k];
        CHECK(std::abs(lhs_eta - rhs_eta) < 1e-9);
    }
}

TEST_CASE("non-immersion raises a geometry error") {
    struct DegenerateMap : PatchMap {
        int ambient_dim() const override { return 3; }
        void eval(const Jet3& u, const Jet3& v, Jet4v& out) const override {
            out = {u, u, Jet3(0.0), Jet3(0.0)};
            (void)v;
        }
    };
    ParametricPatch p(SpaceForm::euclidean(), Domain::rectangle(0, 1, 0, 1),
                      std::make_shared<DegenerateMap>());
    CHECK_THROWS_AS(evaluate_jet(p, 0.5, 0.5), GeometryError);
}

} // TEST_SUITE
