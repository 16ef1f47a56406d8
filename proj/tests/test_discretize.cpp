#include <sstream>

#include "curvatura/assemble.hpp"
#include "curvatura/catalog.hpp"
#include "curvatura/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace curvatura;

namespace {

double operator_asymmetry(const Eigen::SparseMatrix<double>& A) {
    Eigen::SparseMatrix<double> D = Eigen::SparseMatrix<double>(A.transpose()) - A;
    double num = 0, den = 1e-300;
    for (int k = 0; k < D.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it)
            num = std::max(num, std::abs(it.value()));
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
            den = std::max(den, std::abs(it.value()));
    return num / den;
}

} // namespace

TEST_SUITE("discretize") {

TEST_CASE("disk mesh topology") {
    const SurfaceMesh m = mesh_patch(make_plane_disk(1.0), 8);
    CHECK(m.euler_characteristic == 1);
    CHECK(m.n_boundary_components == 1);
    CHECK(m.n_triangles() == 6 * 8 * 8);
    for (const auto& slot : m.boundary)
        CHECK(m.param[slot.vertex].norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("annulus mesh topology") {
    const SurfaceMesh m = mesh_patch(make_sphere_band(1.0, 0.5, 1.2), 6);
    CHECK(m.euler_characteristic == 0);
    CHECK(m.n_boundary_components == 2);
}

TEST_CASE("refinement statistics") {
    const ParametricPatch disk = make_plane_disk(1.0);
    const SurfaceMesh coarse = mesh_patch(disk, 8);
    const SurfaceMesh fine = mesh_patch(disk, 16);
    CHECK(fine.n_triangles() == 4 * coarse.n_triangles());
    CHECK(fine.max_edge_length < 0.6 * coarse.max_edge_length);
    CHECK(fine.max_edge_length > 0.4 * coarse.max_edge_length);
}

TEST_CASE("resolution validation") {
    CHECK_THROWS_AS(mesh_patch(make_plane_disk(1.0), 3), ConfigError);
}

TEST_CASE("robin coefficient values") {
    AssemblyConfig cfg;
    cfg.support = SupportKind::Ball;
    cfg.ball = ball_geometry(SpaceForm::euclidean(), 1.0);

    const CapInBall cap = make_cap_in_ball(SpaceForm::euclidean(), 1.0, 1.0);
    const BoundaryJet bj = evaluate_boundary_jet(cap.patch, 0, 0.3);
    CHECK(robin_coefficient(cfg, bj) == doctest::Approx(-1.0).epsilon(1e-12));

    AssemblyConfig slab;
    slab.support = SupportKind::Slab;
    CHECK(robin_coefficient(slab, bj) == doctest::Approx(0.0));

    const SpaceForm h3 = SpaceForm::with_curvature(-1);
    AssemblyConfig hcfg;
    hcfg.support = SupportKind::Ball;
    hcfg.ball = ball_geometry(h3, 1.0);
    const CapInBall hcap = make_cap_in_ball(h3, 1.0, 0.8);
    const BoundaryJet hbj = evaluate_boundary_jet(hcap.patch, 0, 0.3);
    CHECK(robin_coefficient(hcfg, hbj) ==
          doctest::Approx(-std::cosh(1.0) / std::sinh(1.0)).epsilon(1e-12));

    AssemblyConfig none;
    none.support = SupportKind::None;
    CHECK_THROWS_AS(robin_coefficient(none, bj), ConfigError);
    AssemblyConfig bad;
    bad.support = SupportKind::Ball;
    CHECK_THROWS_AS(robin_coefficient(bad, bj), ConfigError);
    AssemblyConfig badtheta;
    badtheta.support = SupportKind::Slab;
    badtheta.theta = 0;
    CHECK_THROWS_AS(robin_coefficient(badtheta, bj), ConfigError);
}

TEST_CASE("assembled operators: symmetry, mass, stiffness kernel") {
    const SpaceForm sf = SpaceForm::euclidean();
    const CapInBall cap = make_cap_in_ball(sf, 1.0, 1.0);
    const SurfaceMesh mesh = mesh_patch(cap.patch, 16);
    AssemblyConfig cfg;
    cfg.support = SupportKind::Ball;
    cfg.ball = ball_geometry(sf, 1.0);
    const AssembledOperators ops = assemble(mesh, sf, cfg);

    CHECK(operator_asymmetry(ops.K) < 1e-12);
    CHECK(operator_asymmetry(ops.M) < 1e-12);
    CHECK(operator_asymmetry(ops.Q) < 1e-12);
    CHECK(operator_asymmetry(ops.B) < 1e-12);
    CHECK(ops.p1_positive_definite);

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_vertices());
    CHECK((ops.K * ones).lpNorm<Eigen::Infinity>() < 1e-12);

    for (int seed = 1; seed <= 3; ++seed) {
        Eigen::VectorXd x(mesh.n_vertices());
        for (int i = 0; i < x.size(); ++i) x[i] = std::sin(seed * 0.7 + i);
        CHECK(x.dot(ops.M * x) > 0);
    }

    const double analytic = oracles::cap_area(1.0, cap.alpha_max);
    const double mass = ones.dot(ops.M * ones);
    CHECK(std::abs(mass - analytic) < 5e-3 * analytic);
}

TEST_CASE("degenerate flat disk: zero Newton tensor flagged") {
    const ParametricPatch disk = make_plane_disk(1.0);
    const SurfaceMesh mesh = mesh_patch(disk, 8);
    AssemblyConfig cfg; // no support: Neumann, B = 0
    const AssembledOperators ops = assemble(mesh, SpaceForm::euclidean(), cfg);
    CHECK(!ops.p1_positive_definite);
    double kmax = 0;
    for (int k = 0; k < ops.K.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(ops.K, k); it; ++it)
            kmax = std::max(kmax, std::abs(it.value()));
    CHECK(kmax < 1e-14); // P1 = 0 on a flat patch
    CHECK(ops.B.nonZeros() == 0);
}

TEST_CASE("umbilical patch: K equals kappa times the scalar Laplacian stiffness") {
    const SpaceForm sf = SpaceForm::euclidean();
    const CapInBall cap = make_cap_in_ball(sf, 1.0, 2.0); // kappa = 1/2
    const SurfaceMesh mesh = mesh_patch(cap.patch, 12);
    AssemblyConfig cfg;
    cfg.support = SupportKind::Ball;
    cfg.ball = ball_geometry(sf, 1.0);
    const AssembledOperators ops = assemble(mesh, sf, cfg);

    AssemblyConfig audit = cfg;
    audit.laplacian_audit = true;
    const AssembledOperators lap = assemble(mesh, sf, audit);

    const double kappa = 0.5;
    Eigen::SparseMatrix<double> diff = ops.K - kappa * lap.K;
    double num = 0, den = 1e-300;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it)
            num = std::max(num, std::abs(it.value()));
    for (int k = 0; k < ops.K.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(ops.K, k); it; ++it)
            den = std::max(den, std::abs(it.value()));
    CHECK(num / den < 1e-8);
}

TEST_CASE("index form basics") {
    const SpaceForm sf = SpaceForm::euclidean();
    const CapInBall cap = make_cap_in_ball(sf, 1.0, 1.0);
    const SurfaceMesh mesh = mesh_patch(cap.patch, 10);
    AssemblyConfig cfg;
    cfg.support = SupportKind::Ball;
    cfg.ball = ball_geometry(sf, 1.0);
    const AssembledOperators ops = assemble(mesh, sf, cfg);

    const int n = mesh.n_vertices();
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    CHECK(index_form(ops, zero, zero) == 0.0);

    Eigen::VectorXd f1(n), f2(n), f3(n);
    for (int i = 0; i < n; ++i) {
        f1[i] = std::sin(0.3 * i);
        f2[i] = std::cos(0.9 * i);
        f3[i] = std::sin(1.7 * i + 0.5);
    }
    const double a = 1.37, b = -0.61;
    const double lhs = index_form(ops, a * f1 + b * f2, f3);
    const double rhs = a * index_form(ops, f1, f3) + b * index_form(ops, f2, f3);
    CHECK(std::abs(lhs - rhs) < 1e-12 * (std::abs(lhs) + std::abs(rhs) + 1));

    Eigen::VectorXd wrong(n + 1);
    CHECK_THROWS_AS(index_form(ops, wrong, f1), ConfigError);
}

TEST_CASE("mass convergence to the analytic cap area is O(h^2)") {
    const SpaceForm sf = SpaceForm::euclidean();
    const CapInBall cap = make_cap_in_ball(sf, 1.0, 1.0);
    const double analytic = oracles::cap_area(1.0, cap.alpha_max);
    std::vector<double> errs;
    for (int res : {8, 16, 32}) {
        const SurfaceMesh mesh = mesh_patch(cap.patch, res);
        AssemblyConfig cfg;
        const AssembledOperators ops = assemble(mesh, sf, cfg);
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_vertices());
        errs.push_back(std::abs(ones.dot(ops.M * ones) - analytic));
    }
    CHECK(errs[0] / errs[1] > 2.5); // ~4 for O(h^2)
    CHECK(errs[1] / errs[2] > 2.5);
}

TEST_CASE("OFF export format") {
    const SurfaceMesh mesh = mesh_patch(make_plane_disk(1.0), 4);
    std::ostringstream os;
    export_off(mesh, os);
    std::istringstream is(os.str());
    std::string header;
    is >> header;
    CHECK(header == "OFF");
    int nv, nf, ne;
    is >> nv >> nf >> ne;
    CHECK(nv == mesh.n_vertices());
    CHECK(nf == mesh.n_triangles());
    CHECK(ne == 0);
    double x, y, z;
    is >> x >> y >> z;
    CHECK(x == mesh.position[0][0]);
    (void)y; (void)z;
}

TEST_CASE("coordinate-format operator export") {
    const SurfaceMesh mesh = mesh_patch(make_plane_disk(1.0), 4);
    AssemblyConfig cfg;
    const AssembledOperators ops = assemble(mesh, SpaceForm::euclidean(), cfg);
    std::ostringstream os;
    export_coordinate_format(ops.M, os);
    std::istringstream is(os.str());
    int i, j;
    double val;
    is >> i >> j >> val;
    CHECK(val == ops.M.coeff(i, j));
}

} // TEST_SUITE
