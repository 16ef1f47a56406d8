#pragma once

#include "curvatura/surface.hpp"

namespace curvatura {

/// Flat disk { z = 0 } of the given radius in R^3.
ParametricPatch make_plane_disk(double radius);

/// Geographic chart of a round sphere in R^3: u = longitude, v = latitude.
/// With inward = true the normal points toward the center (kappa = 1/r).
ParametricPatch make_sphere_geographic(double r, const Eigen::Vector3d& center,
                                       const Domain& rect, bool inward);

/// Polar cap chart (disk domain) of the sphere centered at `center`, around
/// its north pole, spanning polar angles [0, alpha_max].
ParametricPatch make_sphere_polar_cap(double r, const Eigen::Vector3d& center, double alpha_max,
                                      bool inward = true);

/// Geographic chart of the triaxial ellipsoid (a cos u cos v, b sin u cos v, c sin v).
ParametricPatch make_ellipsoid(double a, double b, double c, const Domain& rect);

/// A totally umbilical cap meeting the geodesic sphere dB_R at a constant
/// angle, parametrized over the unit disk. For the free-boundary cap the
/// center distance is determined by cn_c(d) = cn_c(R) cn_c(r).
struct CapInBall {
    ParametricPatch patch;
    double center_distance = 0;     // geodesic distance ball center -> cap center
    double alpha_max = 0;           // polar angle of the chart at the boundary
    double boundary_circle_radius = 0; // Euclidean case only
};

/// Free-boundary umbilical cap in B_R (orthogonal intersection).
CapInBall make_cap_in_ball(const SpaceForm& sf, double R, double r);

/// Capillary umbilical cap in B_R with prescribed center distance d
/// (Euclidean models only). Throws when the spheres do not intersect.
CapInBall make_cap_in_ball_at_distance(const SpaceForm& sf, double R, double r, double d);

/// Spherical cap sitting on the plane { z = 0 }: sphere of radius r centered
/// at (0,0,h), portion z >= 0. h = 0 gives the free-boundary hemisphere.
ParametricPatch make_cap_on_plane(double r, double h);

/// Non-umbilical patch (triaxial ellipsoid with semi-axes r, 1.2 r, 0.85 r)
/// whose boundary curve waves with the chart angle: the negative control for
/// the boundary principal-direction audit. chart_scale sets the size,
/// amplitude the wave.
ParametricPatch make_wavy_patch(double r, double chart_scale, double amplitude);

/// Graph z = scale (x^3 - 3 x y^2) over a disk: isolated flat umbilic of
/// index -1/2 at the origin.
ParametricPatch make_monkey_saddle(double scale, double radius);

/// Spherical band between polar angles [alpha0, alpha1] on an annulus domain.
ParametricPatch make_sphere_band(double r, double alpha0, double alpha1);

} // namespace curvatura
