#pragma once

#include <Eigen/Sparse>
#include <iosfwd>
#include <optional>

#include "curvatura/mesh.hpp"

namespace curvatura {

enum class SupportKind { None, Ball, Slab };

/// Configuration of the capillary boundary-value problem to assemble.
struct AssemblyConfig {
    double theta = M_PI / 2;        // contact angle in (0, pi)
    SupportKind support = SupportKind::None;
    std::optional<BallGeometry> ball; // required for SupportKind::Ball
    int quadrature_order = 2;

    /// Audit mode: replaces P1 by the identity, q_r by q_override and
    /// |P1 nu| by 1, turning the forms into the scalar-Laplacian analog.
    bool laplacian_audit = false;
    double q_override = 0;

    /// Additive shift of the Robin coefficient (monotonicity experiments).
    double alpha_shift = 0;
};

/// Sparse symmetric forms of the 1-index form: stiffness K (P1-weighted),
/// mass M, potential Q (density 2 H1 (H2 + c)), and the Robin boundary
/// form B (density |P1 nu| alpha_theta).
struct AssembledOperators {
    Eigen::SparseMatrix<double> K, M, Q, B;
    std::vector<double> alpha;        // per boundary vertex, mesh.boundary order
    bool p1_positive_definite = false;
    double min_p1_eigenvalue = 0;
    double h_max = 0;
    double area = 0;
    double q_scale = 0; // max |q_r| over vertices
    const SurfaceMesh* mesh = nullptr;

    Eigen::SparseMatrix<double> index_operator() const { return K - Q + B; }
};

/// Robin coefficient alpha_theta = csc(theta) (II_dOmega)_(eta-bar)(nu-bar,
/// nu-bar) - cot(theta) (II_Sigma)_eta(nu, nu). Throws when the support
/// geometry needed for the first term is missing.
double robin_coefficient(const AssemblyConfig& cfg, const BoundaryJet& bjet);

/// Piecewise-linear finite element assembly of all four forms. Elementwise
/// tensors are arithmetic means of the vertex tensors in the parametric
/// frame; boundary integrals use 2-point Gauss per edge.
AssembledOperators assemble(const SurfaceMesh& mesh, const SpaceForm& sf,
                            const AssemblyConfig& cfg);

/// The 1-index form I(f1, f2) = f1^T (K - Q + B) f2.
double index_form(const AssembledOperators& ops, const Eigen::VectorXd& f1,
                  const Eigen::VectorXd& f2);

/// Lumped mass vector (row sums of M).
Eigen::VectorXd lumped_mass(const AssembledOperators& ops);

/// Mass-like form with a per-vertex density: int density u v dmu.
Eigen::SparseMatrix<double> assemble_density_form(const SurfaceMesh& mesh,
                                                  const std::vector<double>& density);

/// Writes a sparse operator as "i j value" lines.
void export_coordinate_format(const Eigen::SparseMatrix<double>& A, std::ostream& os);

} // namespace curvatura
