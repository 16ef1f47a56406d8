#include <random>

#include "curvatura/catalog.hpp"
#include "curvatura/errors.hpp"
#include "curvatura/spectrum.hpp"
#include "doctest.h"

using namespace curvatura;

namespace {

struct CapSetup {
    SurfaceMesh mesh;
    AssembledOperators ops;
};

CapSetup unit_ball_cap(int res, double r = 1.0) {
    const SpaceForm sf = SpaceForm::euclidean();
    const CapInBall cap = make_cap_in_ball(sf, 1.0, r);
    CapSetup s{mesh_patch(cap.patch, res), {}};
    AssemblyConfig cfg;
    cfg.support = SupportKind::Ball;
    cfg.ball = ball_geometry(sf, 1.0);
    s.ops = assemble(s.mesh, sf, cfg);
    return s;
}

// Dense generalized eigensolver oracle on the pencil (S, M), optionally
// restricted to the M-orthogonal complement of constants.
std::vector<double> dense_pencil_eigenvalues(const AssembledOperators& ops, int k,
                                             bool constrained) {
    const Eigen::MatrixXd S = Eigen::MatrixXd(ops.index_operator());
    const Eigen::MatrixXd M = Eigen::MatrixXd(ops.M);
    const int n = static_cast<int>(S.rows());
    if (!constrained) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, M);
        std::vector<double> out;
        for (int i = 0; i < k; ++i) out.push_back(eig.eigenvalues()[i]);
        return out;
    }
    // Basis of { v : 1^T M v = 0 } from the QR factorization.
    const Eigen::VectorXd w = M * Eigen::VectorXd::Ones(n);
    Eigen::MatrixXd A(n, 1);
    A.col(0) = w;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::MatrixXd Qfull = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd Z = Qfull.rightCols(n - 1);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        Z.transpose() * S * Z, Z.transpose() * M * Z);
    std::vector<double> out;
    for (int i = 0; i < k; ++i) out.push_back(eig.eigenvalues()[i]);
    return out;
}

} // namespace

TEST_SUITE("stability") {

TEST_CASE("block Lanczos matches the dense oracle") {
    // Resolution 14 gives 631 vertices, above the internal dense-path cutoff,
    // so this genuinely exercises the shift-invert iteration.
    const CapSetup s = unit_ball_cap(14);
    const int k = 5;
    for (bool constrained : {false, true}) {
        const Spectrum sp = solve_spectrum(s.ops, k, constrained);
        const std::vector<double> oracle = dense_pencil_eigenvalues(s.ops, k, constrained);
        const double scale = std::abs(oracle[k - 1]) + 1;
        for (int i = 0; i < k; ++i) {
            CHECK(std::abs(sp.eigenvalues[i] - oracle[i]) < 1e-7 * scale);
            CHECK(sp.residuals[i] < 1e-7);
        }
        // M-orthonormality of the eigenfunctions.
        const Eigen::MatrixXd G =
            sp.eigenfunctions.transpose() * s.ops.M * sp.eigenfunctions;
        CHECK((G - Eigen::MatrixXd::Identity(k, k)).norm() < 1e-8);
    }
}

TEST_CASE("Neumann Laplacian has the constant zero mode") {
    // P1 -> Id, q -> 0, no boundary term: the first eigenpair is (0, const).
    const SpaceForm sf = SpaceForm::euclidean();
    const CapInBall cap = make_cap_in_ball(sf, 1.0, 1.0);
    const SurfaceMesh mesh = mesh_patch(cap.patch, 12);
    AssemblyConfig cfg;
    cfg.laplacian_audit = true; // support None: B = 0
    const AssembledOperators ops = assemble(mesh, sf, cfg);
    const Spectrum sp = solve_spectrum(ops, 3, false);
    CHECK(std::abs(sp.eigenvalues[0]) < 1e-9);
    CHECK(sp.eigenvalues[1] > 0.1);
    // Eigenfunction is constant.
    const Eigen::VectorXd v = sp.eigenfunctions.col(0);
    const double mean = v.mean();
    CHECK((v.array() - mean).abs().maxCoeff() < 1e-7 * std::abs(mean));
}

TEST_CASE("flat disk with Robin alpha = -1 is strongly unstable") {
    // CMC analog audit: P1 replaced by the identity on the equatorial disk of
    // the unit ball. I(1,1) = -|dSigma| < 0, so the full-space lambda_1 < 0.
    const SpaceForm sf = SpaceForm::euclidean();
    const ParametricPatch disk = make_plane_disk(1.0);
    const SurfaceMesh mesh = mesh_patch(disk, 16);
    AssemblyConfig cfg;
    cfg.support = SupportKind::Ball;
    cfg.ball = ball_geometry(sf, 1.0);
    cfg.laplacian_audit = true;
    const AssembledOperators ops = assemble(mesh, sf, cfg);

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_vertices());
    const double I11 = index_form(ops, ones, ones);
    CHECK(I11 == doctest::Approx(-2 * M_PI).epsilon(2e-3));

    const Spectrum sp = solve_spectrum(ops, 2, false);
    CHECK(sp.eigenvalues[0] < -0.1);
}

TEST_CASE("unit-ball cap is 1-stable; perturbed potential is not") {
    const CapSetup s = unit_ball_cap(24);
    const StabilityVerdict v = stability_verdict(s.ops);
    CHECK(v.stable);
    CHECK(!v.strongly_stable); // constants are a negative direction
    CHECK(v.lambda_min_full < 0);
    CHECK(v.lambda_min_constrained > -v.tolerance);

    AssembledOperators perturbed = s.ops;
    perturbed.Q = 10.0 * s.ops.Q;
    const StabilityVerdict vp = stability_verdict(perturbed);
    CHECK(!vp.stable);
}

TEST_CASE("verdict refuses indefinite P1") {
    const ParametricPatch disk = make_plane_disk(1.0);
    const SurfaceMesh mesh = mesh_patch(disk, 8);
    AssemblyConfig cfg;
    cfg.support = SupportKind::Ball;
    cfg.ball = ball_geometry(SpaceForm::euclidean(), 1.0);
    const AssembledOperators ops = assemble(mesh, SpaceForm::euclidean(), cfg);
    CHECK(!ops.p1_positive_definite);
    CHECK_THROWS_AS(stability_verdict(ops), SolverError);
}

TEST_CASE("Rayleigh consistency of reported pairs") {
    const CapSetup s = unit_ball_cap(12);
    for (bool constrained : {false, true}) {
        const Spectrum sp = solve_spectrum(s.ops, 4, constrained);
        for (int i = 0; i < 4; ++i) {
            const Eigen::VectorXd v = sp.eigenfunctions.col(i);
            const double I = index_form(s.ops, v, v);
            const double lm = sp.eigenvalues[i] * v.dot(s.ops.M * v);
            CHECK(std::abs(I - lm) < 1e-8 * std::abs(lm) + 1e-10);
        }
    }
}

TEST_CASE("monotonicity in the Robin coefficient") {
    const SpaceForm sf = SpaceForm::euclidean();
    const CapInBall cap = make_cap_in_ball(sf, 1.0, 1.0);
    const SurfaceMesh mesh = mesh_patch(cap.patch, 12);
    AssemblyConfig cfg;
    cfg.support = SupportKind::Ball;
    cfg.ball = ball_geometry(sf, 1.0);

    double prev = -1e300;
    for (double shift : {0.0, 0.5, 1.0}) {
        AssemblyConfig shifted = cfg;
        shifted.alpha_shift = shift;
        const AssembledOperators ops = assemble(mesh, sf, shifted);
        const Spectrum sp = solve_spectrum(ops, 1, false);
        CHECK(sp.eigenvalues[0] >= prev - 1e-10);
        prev = sp.eigenvalues[0];
    }
}

TEST_CASE("constrained lambda_1 dominates the unconstrained one") {
    const CapSetup s = unit_ball_cap(12);
    const Spectrum full = solve_spectrum(s.ops, 1, false);
    const Spectrum con = solve_spectrum(s.ops, 1, true);
    CHECK(con.eigenvalues[0] >= full.eigenvalues[0] - 1e-10);
}

TEST_CASE("jacobi residual") {
    const CapSetup s = unit_ball_cap(16);
    const int n = s.mesh.n_vertices();

    // Zero function: both residuals vanish.
    const JacobiResidual zero = jacobi_residual(s.ops, Eigen::VectorXd::Zero(n));
    CHECK(zero.interior_deviation == 0.0);
    CHECK(zero.boundary_residual == 0.0);

    // Constrained zero mode (ambient tilt rotation): small residuals.
    const Spectrum sp = solve_spectrum(s.ops, 2, true);
    CHECK(std::abs(sp.eigenvalues[0]) < 5e-3);
    Eigen::VectorXd mode = sp.eigenfunctions.col(0);
    mode /= mode.lpNorm<Eigen::Infinity>();
    const JacobiResidual jr = jacobi_residual(s.ops, mode);
    CHECK(jr.interior_deviation < 1e-3);
    CHECK(jr.boundary_residual < 2e-2);

    // Random vector: O(1) residuals (negative control).
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> d(-1, 1);
    Eigen::VectorXd noise(n);
    for (int i = 0; i < n; ++i) noise[i] = d(rng);
    const JacobiResidual jn = jacobi_residual(s.ops, noise);
    CHECK(jn.interior_deviation > 1.0);
}

TEST_CASE("discrete Robin eigenvalue converges at O(h^2)") {
    // Mesh-convergence invariant on the unit-ball cap: the lowest constrained
    // eigenvalue tends to its limit (0 for the umbilical cap) at O(h^2).
    std::vector<double> lam;
    for (int res : {8, 16, 32}) {
        const CapSetup s = unit_ball_cap(res);
        const Spectrum sp = solve_spectrum(s.ops, 1, true);
        lam.push_back(sp.eigenvalues[0]);
    }
    const double e0 = std::abs(lam[0]), e1 = std::abs(lam[1]), e2 = std::abs(lam[2]);
    CHECK(e0 / e1 > 2.8); // 4 +- 30%
    CHECK(e0 / e1 < 5.2);
    CHECK(e1 / e2 > 2.8);
    CHECK(e1 / e2 < 5.2);
}

TEST_CASE("spectrum CSV export") {
    const CapSetup s = unit_ball_cap(8);
    const Spectrum sp = solve_spectrum(s.ops, 2, false);
    std::ostringstream os;
    sp.export_csv(os);
    CHECK(os.str().rfind("index,lambda,residual\n", 0) == 0);
}

} // TEST_SUITE
