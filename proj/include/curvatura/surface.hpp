#pragma once

#include <array>

#include "curvatura/patch.hpp"

namespace curvatura {

/// Pointwise second-order data of an immersion at a parameter point.
/// Coordinate-frame tensors live in the (u, v) basis; *_on fields are the
/// symmetric representatives in the metric-orthonormalized frame
/// E = [d_u d_v] L^{-T}, metric = L L^T.
struct SurfaceJet {
    Eigen::Vector2d param;
    Eigen::Vector4d position;
    Eigen::Vector4d normal;
    Eigen::Vector4d tangent_u, tangent_v;

    Eigen::Matrix2d metric;     // [E F; F G]
    Eigen::Matrix2d second_ff;  // [e f; f g], scalar II in coordinates
    Eigen::Matrix2d shape;      // Weingarten A = metric^{-1} second_ff
    Eigen::Matrix2d chol_L;     // lower Cholesky factor of the metric
    Eigen::Matrix2d shape_on;   // L^{-1} second_ff L^{-T}
    Eigen::Matrix2d newton_on;  // P1 = 2 H1 I - A, orthonormal frame

    double kappa1 = 0, kappa2 = 0; // kappa1 >= kappa2
    double H1 = 0, H2 = 0;
    double umbilicity_defect = 0;  // kappa1 - kappa2
    Eigen::Vector2d principal_dir_on; // kappa1 eigendirection, orthonormal frame
    double sqrt_det_g = 0;
    double gauss_intrinsic = 0; // Brioschi K from the metric alone; NaN if unavailable

    Eigen::Matrix2d newton_coord() const { return 2 * H1 * Eigen::Matrix2d::Identity() - shape; }
};

/// Residuals of tr P1 = 2 H1, tr P1 A = 2 H2, tr P1 A^2 = 2 H1 H2.
std::array<double, 3> verify_newton_identities(const SurfaceJet& jet);

/// Jet plus the jet-valued fields needed for analytic tangential calculus
/// (Christoffel symbols, the Cheng-Yau operator L1, surface gradients).
struct ExtendedJet {
    SurfaceJet jet;
    Jet4v pos;     // full 3-jet of the position
    Jet4v normal;  // valid to order 2
    Jet3 E, F, G;  // metric entries, valid to order 2

    Eigen::Matrix2d gamma_u, gamma_v; // Christoffel matrices (Gamma^u)_{ij}, (Gamma^v)_{ij}
    Eigen::Matrix2d metric_inv;
    Eigen::Vector2d dH2;  // coordinate partials of H2 (jet order 3 only; else NaN)
    Eigen::Vector2d dH1;

    /// Coordinate Hessian of a scalar field given as an order-2 jet at this point.
    Eigen::Matrix2d hessian(const Jet3& field) const;
    /// Cheng-Yau operator L1 f = tr(P1 (Hess f)^flat).
    double L1(const Jet3& field) const;
    /// Laplace-Beltrami, for audit comparisons.
    double laplacian(const Jet3& field) const;
    /// Coordinate components of the surface gradient g^{-1} (df_u, df_v).
    Eigen::Vector2d surface_gradient_coords(const Jet3& field) const;
    /// Ambient surface gradient.
    Eigen::Vector4d surface_gradient(const Jet3& field) const;
};

/// Full jet; throws GeometryError on a degenerate metric.
SurfaceJet evaluate_jet(const ParametricPatch& patch, double u, double v);
ExtendedJet evaluate_extended(const ParametricPatch& patch, double u, double v);

/// Unit normal as a jet (valid to order 2) from a position 3-jet: the cross
/// product of the tangents (and, for curved models, the position), normalized
/// in the ambient metric and scaled by orientation_sign.
Jet4v jet_unit_normal(const SpaceForm& sf, const Jet4v& pos, double orientation_sign);

/// Boundary data at a point of the domain boundary.
struct BoundaryJet {
    Eigen::Vector2d param;
    int component = 0;
    double s = 0; // boundary curve parameter
    Eigen::Vector4d position;
    Eigen::Vector4d conormal; // outward unit conormal nu, tangent to the surface
    Eigen::Vector4d tangent;  // unit boundary tangent T (positive s direction)
    Eigen::Vector4d normal;   // surface unit normal eta at the boundary point
    Eigen::Vector2d conormal_param; // nu in (u,v) coordinates, g-unit
    Eigen::Vector2d tangent_param;
    double kappa_g = 0;  // geodesic curvature in the induced metric
    double II_nn = 0;    // (II_Sigma)_eta(nu, nu)
    double II_nt = 0;    // (II_Sigma)_eta(nu, T)
    double H1 = 0;
    double P1nu_norm = 0; // |P1 nu|
};

/// Parametrized boundary loop of a domain, oriented with the domain on the
/// left (outer loops counterclockwise, annulus inner loop clockwise).
struct BoundaryCurve {
    int component = 0;
    double s_begin = 0, s_end = 0;
    std::function<Eigen::Vector2d(double)> point, d1, d2;
    std::function<Eigen::Vector2d(double)> outward; // unit outward domain normal
    std::vector<double> corner_params;              // rectangle corners
};

std::vector<BoundaryCurve> boundary_curves(const Domain& domain);

/// Boundary jet at curve parameter s on the given component. Throws at
/// rectangle corners where the tangent is undefined.
BoundaryJet evaluate_boundary_jet(const ParametricPatch& patch, int component, double s);

/// Returns the patch with orientation_sign chosen so kappa2 > 0 (hence P1
/// positive definite) on a sample grid. Requires H2 > 0 everywhere on the
/// grid; throws GeometryError otherwise. Idempotent.
ParametricPatch orient_for_positivity(const ParametricPatch& patch, int samples_per_side = 9);

} // namespace curvatura
