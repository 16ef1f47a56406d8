#pragma once

#include <string>

#include "curvatura/surface.hpp"

namespace curvatura {

/// Profile curve of a rotational surface with kappa_meridian kappa_parallel
/// = H2, in arclength/angle variables:
///   rho' = cos(psi), z' = sin(psi), psi' = H2 rho / sin(psi).
struct ProfileSample {
    double s = 0, rho = 0, z = 0, psi = 0;
};

struct RotationalProfile {
    double H2 = 1;
    std::vector<ProfileSample> samples; // ascending s
    bool shooting_converged = false;    // vertical tangents at two heights
    bool closed_at_pole = false;        // sphere-family smooth closure
    std::string outcome;
    std::vector<double> vertical_tangent_heights;
    double s_min = 0, s_max = 0;
};

struct ShootingOptions {
    int max_iterations = 32;
    double tol = 1e-8;
    double s_span = 0; // 0: automatic (1.2 periods of the radius oscillation)
};

/// Integrates the profile ODE from (rho0, z = 0, psi0) with an adaptive
/// 4(5)-order scheme at absolute tolerance 1e-9, then scans the launch angle
/// for a profile with vertical tangents (cos psi = 0) at two heights, which
/// a free-boundary surface in a slab requires. The scan outcome is reported,
/// not assumed: for constant H2 > 0 the radius is sinusoidal in arclength
/// and a second vertical tangent does not occur away from the sphere family;
/// callers treat shooting_converged = false as the documented failure mode.
/// Throws GeometryError for H2 <= 0 or a non-Euclidean space form, and
/// SolverError if the ODE blows up immediately.
RotationalProfile rotational_h2_profile(const SpaceForm& sf, double H2, double rho0,
                                        double psi0 = M_PI / 2,
                                        const ShootingOptions& opts = {});

/// Surface of revolution from a profile: phi(s, u) = (rho(s) cos u,
/// rho(s) sin u, z(s)) on [s0, s1] x [0, 2pi), with the profile represented
/// by piecewise-quintic Hermite interpolation consistent with the ODE.
ParametricPatch make_rotational_patch(const RotationalProfile& profile, double s0, double s1);

} // namespace curvatura
