#pragma once

#include <Eigen/Dense>
#include <vector>

#include "curvatura/jets.hpp"

namespace curvatura {

/// Generalized sine: the solution of y'' + c y = 0 with y(0) = 0, y'(0) = 1.
double sn(double c, double rho);

/// Generalized cosine, the rho-derivative of sn.
double cn(double c, double rho);

/// Ambient model of the simply connected space form M^3(c).
///
/// c = 0:  R^3 as the x4 = 0 slice of R^4, Euclidean metric.
/// c > 0:  the sphere { <x,x> = 1/c } in R^4, Euclidean metric.
/// c < 0:  the upper hyperboloid { <x,x> = 1/c, x4 > 0 } in Minkowski R^4_1.
///
/// All ambient vectors are stored as Vector4d; for c = 0 the last component
/// is identically zero.
class SpaceForm {
public:
    static SpaceForm euclidean() { return SpaceForm(0.0); }
    static SpaceForm with_curvature(double c) { return SpaceForm(c); }

    double curvature() const { return c_; }
    int model_dim() const { return c_ == 0 ? 3 : 4; }

    /// Signature entries (+1/-1) of the ambient metric, one per coordinate.
    std::vector<double> signature() const;

    /// Signed ambient inner product sum_i sig_i u_i v_i.
    double inner(const Eigen::Vector4d& u, const Eigen::Vector4d& v) const;
    Jet3 inner(const Jet4v& u, const Jet4v& v) const;

    /// Checked variant taking model_dim()-sized vectors; throws on mismatch.
    double inner_checked(const std::vector<double>& u, const std::vector<double>& v) const;

    double norm(const Eigen::Vector4d& u) const { return std::sqrt(std::abs(inner(u, u))); }

    /// Metric-adapted generalized cross product: the unique w with
    /// inner(w, z) = det(vectors..., z) for all z. Takes 2 vectors when
    /// model_dim = 3 and 3 vectors when model_dim = 4; throws otherwise.
    Eigen::Vector4d cross(const std::vector<Eigen::Vector4d>& vectors) const;

    Eigen::Vector4d cross(const Eigen::Vector4d& a, const Eigen::Vector4d& b) const;
    Eigen::Vector4d cross(const Eigen::Vector4d& a, const Eigen::Vector4d& b,
                          const Eigen::Vector4d& c) const;
    Jet4v cross(const Jet4v& a, const Jet4v& b) const;
    Jet4v cross(const Jet4v& a, const Jet4v& b, const Jet4v& c) const;

    /// Residual of the model constraint at x: 0 for points on the model.
    double model_residual(const Eigen::Vector4d& x) const;
    bool on_model(const Eigen::Vector4d& x, double tol = 1e-10) const {
        return model_residual(x) <= tol;
    }

    /// Reference point of the curved models: (0,0,0, 1/sqrt(|c|)).
    Eigen::Vector4d base_point() const;

    /// Geodesic distance between model points.
    double distance(const Eigen::Vector4d& x, const Eigen::Vector4d& y) const;

    /// Geodesic exp_x(w) for tangent w at model point x (w != 0 handled).
    Eigen::Vector4d exponential(const Eigen::Vector4d& x, const Eigen::Vector4d& w) const;

private:
    explicit SpaceForm(double c) : c_(c) {}
    double c_;
};

/// Boundary data of the geodesic ball B_R in M^3(c).
struct BallGeometry {
    double radius = 0;
    /// (II_{dB})_{eta-bar}(nu-bar, nu-bar) with respect to the outward normal.
    double boundary_second_fundamental = 0;
    /// Geodesic curvature of the free-boundary trace dSigma in Sigma.
    double boundary_geodesic_curvature = 0;
};

/// Data of B_R; throws GeometryError when R is outside the convexity range
/// (0, R_c), R_c = pi / (2 sqrt(c)) for c > 0 and infinity otherwise.
BallGeometry ball_geometry(const SpaceForm& sf, double R);

} // namespace curvatura
