// Test-only oracles, independent of the library's jet pipeline.
#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace oracles {

// Principal curvatures of the level set {F = 0} of a quadric
// sum x_i^2 / s_i^2 = 1 at a point, with respect to the outward normal
// grad F / |grad F|, in the convention kappa = -eigenvalue of grad(n):
// a sphere of radius r has kappa = -1/r with respect to the outward normal.
inline void quadric_level_set_curvatures(const Eigen::Vector3d& semi_axes,
                                         const Eigen::Vector3d& x, double& k1, double& k2) {
    const Eigen::Vector3d inv2(1 / (semi_axes[0] * semi_axes[0]),
                               1 / (semi_axes[1] * semi_axes[1]),
                               1 / (semi_axes[2] * semi_axes[2]));
    const Eigen::Vector3d grad = 2 * x.cwiseProduct(inv2);
    const Eigen::Matrix3d hess = 2 * inv2.asDiagonal();
    const Eigen::Vector3d n = grad.normalized();
    const Eigen::Matrix3d P = Eigen::Matrix3d::Identity() - n * n.transpose();
    const Eigen::Matrix3d S = P * hess * P / grad.norm();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(S);
    // Two nonzero eigenvalues (the third, along n, is zero).
    Eigen::Vector3d ev = eig.eigenvalues();
    // Sort by absolute value descending; the smallest-|.| one is the null direction.
    int zero_idx = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(ev[i]) < std::abs(ev[zero_idx])) zero_idx = i;
    double vals[2];
    int k = 0;
    for (int i = 0; i < 3; ++i)
        if (i != zero_idx) vals[k++] = -ev[i]; // outward-normal shape convention
    k1 = std::max(vals[0], vals[1]);
    k2 = std::min(vals[0], vals[1]);
}

// Spherical cap area: radius r, polar angle alpha.
inline double cap_area(double r, double alpha) { return 2 * M_PI * r * r * (1 - std::cos(alpha)); }

// j'_{1,1}: first positive zero of J_1', for the second Neumann eigenvalue of
// the unit disk.
inline constexpr double kBesselJPrime11 = 1.8411837813406593;

} // namespace oracles
