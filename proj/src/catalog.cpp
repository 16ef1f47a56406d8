#include "curvatura/catalog.hpp"

#include <cmath>

#include "curvatura/errors.hpp"

namespace curvatura {

namespace {

struct PlaneDiskMap : PatchMap {
    int ambient_dim() const override { return 3; }
    void eval(const Jet3& u, const Jet3& v, Jet4v& out) const override {
        out = {u, v, Jet3(0.0), Jet3(0.0)};
    }
};

struct SphereGeoMap : PatchMap {
    double r;
    Eigen::Vector3d c;
    SphereGeoMap(double r_, Eigen::Vector3d c_) : r(r_), c(std::move(c_)) {}
    int ambient_dim() const override { return 3; }
    void eval(const Jet3& u, const Jet3& v, Jet4v& out) const override {
        const Jet3 cu = cos(u), su = sin(u), cv = cos(v), sv = sin(v);
        out = {c[0] + r * cu * cv, c[1] + r * su * cv, c[2] + r * sv, Jet3(0.0)};
    }
};

// Polar chart around the +axis pole: for (x, y) in the unit disk the polar
// angle is alpha_max * |(x,y)|, expressed through series in t = x^2 + y^2 so
// the map is analytic at the center.
struct SpherePolarMap : PatchMap {
    double r, amax;
    Eigen::Vector3d c;
    SpherePolarMap(double r_, Eigen::Vector3d c_, double amax_) : r(r_), amax(amax_), c(std::move(c_)) {}
    int ambient_dim() const override { return 3; }
    void eval(const Jet3& x, const Jet3& y, Jet4v& out) const override {
        const Jet3 t = x * x + y * y;
        const Jet3 S = sinc_sqrt(t, amax, +1); // sin(amax rho)/rho
        const Jet3 C = cos_sqrt(t, amax, +1);  // cos(amax rho)
        out = {c[0] + r * x * S, c[1] + r * y * S, c[2] + r * C, Jet3(0.0)};
    }
};

struct EllipsoidMap : PatchMap {
    double a, b, c;
    EllipsoidMap(double a_, double b_, double c_) : a(a_), b(b_), c(c_) {}
    int ambient_dim() const override { return 3; }
    void eval(const Jet3& u, const Jet3& v, Jet4v& out) const override {
        const Jet3 cu = cos(u), su = sin(u), cv = cos(v), sv = sin(v);
        out = {a * cu * cv, b * su * cv, c * sv, Jet3(0.0)};
    }
};

// Geodesic sphere cap in the curved models: points
//   phi = cn_c(r) x_c + sn_c(r) (cos(alpha) ahat + sin(alpha)(x e1 + y e2)/rho)
// with alpha = alpha_max * rho over the unit disk.
struct CurvedCapMap : PatchMap {
    Eigen::Vector4d xc, ahat, p1, p2;
    double cnr, snr, amax;
    int ambient_dim() const override { return 4; }
    void eval(const Jet3& x, const Jet3& y, Jet4v& out) const override {
        const Jet3 t = x * x + y * y;
        const Jet3 S = sinc_sqrt(t, amax, +1);
        const Jet3 C = cos_sqrt(t, amax, +1);
        for (int k = 0; k < 4; ++k)
            out[k] = cnr * xc[k] + snr * (C * ahat[k] + x * S * p1[k] + y * S * p2[k]);
    }
};

// Euclidean cap: center at distance d along +e3, chart around the pole
// nearest the ball center.
struct EuclideanCapMap : PatchMap {
    double r, d, amax;
    int ambient_dim() const override { return 3; }
    void eval(const Jet3& x, const Jet3& y, Jet4v& out) const override {
        const Jet3 t = x * x + y * y;
        const Jet3 S = sinc_sqrt(t, amax, +1);
        const Jet3 C = cos_sqrt(t, amax, +1);
        out = {r * x * S, r * y * S, d - r * C, Jet3(0.0)};
    }
};

struct CapOnPlaneMap : PatchMap {
    double r, h, amax;
    int ambient_dim() const override { return 3; }
    void eval(const Jet3& x, const Jet3& y, Jet4v& out) const override {
        const Jet3 t = x * x + y * y;
        const Jet3 S = sinc_sqrt(t, amax, +1);
        const Jet3 C = cos_sqrt(t, amax, +1);
        out = {r * x * S, r * y * S, h + r * C, Jet3(0.0)};
    }
};

struct WavyPatchMap : PatchMap {
    double a, b, c, s, amp;
    int ambient_dim() const override { return 3; }
    void eval(const Jet3& x, const Jet3& y, Jet4v& out) const override {
        // Radial projection of a perturbed graph direction onto a triaxial
        // ellipsoid; the cubic term makes the boundary oscillate with angle
        // so the outward conormal is nowhere near a principal direction.
        const Jet3 p3 = 3.0 * x * x * y - y * y * y;
        const Jet3 mx = s * x, my = s * y, mz = 1.0 + amp * p3;
        const Jet3 lam =
            reciprocal(sqrt(mx * mx / (a * a) + my * my / (b * b) + mz * mz / (c * c)));
        out = {mx * lam, my * lam, mz * lam, Jet3(0.0)};
    }
};

struct MonkeySaddleMap : PatchMap {
    double s;
    explicit MonkeySaddleMap(double s_) : s(s_) {}
    int ambient_dim() const override { return 3; }
    void eval(const Jet3& u, const Jet3& v, Jet4v& out) const override {
        out = {u, v, s * (u * u * u - 3.0 * u * v * v), Jet3(0.0)};
    }
};

ParametricPatch positively_oriented(ParametricPatch p) { return orient_for_positivity(p); }

} // namespace

ParametricPatch make_plane_disk(double radius) {
    return ParametricPatch(SpaceForm::euclidean(), Domain::disk(radius),
                           std::make_shared<PlaneDiskMap>());
}

ParametricPatch make_sphere_geographic(double r, const Eigen::Vector3d& center,
                                       const Domain& rect, bool inward) {
    ParametricPatch p(SpaceForm::euclidean(), rect, std::make_shared<SphereGeoMap>(r, center));
    const SurfaceJet j = evaluate_jet(p, 0.5 * (rect.u0 + rect.u1), 0.5 * (rect.v0 + rect.v1));
    const bool is_inward = j.kappa1 > 0; // inward normal of a sphere has kappa = 1/r
    if (is_inward != inward) return p.with_orientation(-1);
    return p;
}

ParametricPatch make_sphere_polar_cap(double r, const Eigen::Vector3d& center, double alpha_max,
                                      bool inward) {
    if (!(alpha_max > 0) || !(alpha_max < M_PI))
        throw GeometryError("make_sphere_polar_cap: alpha_max outside (0, pi)");
    ParametricPatch p(SpaceForm::euclidean(), Domain::disk(1.0),
                      std::make_shared<SpherePolarMap>(r, center, alpha_max));
    const SurfaceJet j = evaluate_jet(p, 0.3, 0.1);
    const bool is_inward = j.kappa1 > 0;
    if (is_inward != inward) return p.with_orientation(-1);
    return p;
}

ParametricPatch make_ellipsoid(double a, double b, double c, const Domain& rect) {
    ParametricPatch p(SpaceForm::euclidean(), rect, std::make_shared<EllipsoidMap>(a, b, c));
    p.closed_surface_euler = 2;
    return orient_for_positivity(p);
}

CapInBall make_cap_in_ball(const SpaceForm& sf, double R, double r) {
    const double c = sf.curvature();
    ball_geometry(sf, R); // validates R against the convexity range
    if (!(r > 0)) throw GeometryError("make_cap_in_ball: cap radius must be positive");

    if (c == 0) {
        const double d = std::hypot(R, r);
        auto map = std::make_shared<EuclideanCapMap>();
        map->r = r;
        map->d = d;
        map->amax = std::acos(r / d);
        CapInBall cap{positively_oriented(ParametricPatch(sf, Domain::disk(1.0), map)), d,
                      map->amax, r * R / d};
        return cap;
    }

    if (c > 0 && !(r < M_PI / (2 * std::sqrt(c))))
        throw GeometryError("make_cap_in_ball: cap radius too large for the spherical model");
    const double cnd = cn(c, R) * cn(c, r);
    double d;
    if (c > 0) {
        if (!(cnd > -1 && cnd < 1))
            throw GeometryError("make_cap_in_ball: no orthogonal intersection for these radii");
        d = std::acos(cnd) / std::sqrt(c);
    } else {
        d = std::acosh(cnd) / std::sqrt(-c);
    }
    const double cos_amax = cn(c, R) * sn(c, r) / sn(c, d);
    if (!(cos_amax > -1 && cos_amax < 1))
        throw GeometryError("make_cap_in_ball: inadmissible (R, r)");

    auto map = std::make_shared<CurvedCapMap>();
    const Eigen::Vector4d xb = sf.base_point();
    const Eigen::Vector4d e3 = Eigen::Vector4d(0, 0, 1, 0);
    map->xc = cn(c, d) * xb + sn(c, d) * e3;
    map->ahat = (xb - cn(c, d) * map->xc) / sn(c, d); // unit tangent at x_c toward x_b
    map->p1 = Eigen::Vector4d(1, 0, 0, 0);
    map->p2 = Eigen::Vector4d(0, 1, 0, 0);
    map->cnr = cn(c, r);
    map->snr = sn(c, r);
    map->amax = std::acos(cos_amax);
    CapInBall cap{positively_oriented(ParametricPatch(sf, Domain::disk(1.0), map)), d, map->amax,
                  0.0};
    return cap;
}

CapInBall make_cap_in_ball_at_distance(const SpaceForm& sf, double R, double r, double d) {
    if (sf.curvature() != 0)
        throw GeometryError("make_cap_in_ball_at_distance: Euclidean model only");
    if (!(d > std::abs(R - r) && d < R + r))
        throw GeometryError("make_cap_in_ball_at_distance: spheres do not intersect");
    const double cos_amax = (d * d + r * r - R * R) / (2 * r * d);
    if (!(cos_amax > -1 && cos_amax < 1))
        throw GeometryError("make_cap_in_ball_at_distance: inadmissible (R, r, d)");
    auto map = std::make_shared<EuclideanCapMap>();
    map->r = r;
    map->d = d;
    map->amax = std::acos(cos_amax);
    CapInBall cap{positively_oriented(ParametricPatch(sf, Domain::disk(1.0), map)), d, map->amax,
                  r * std::sin(map->amax)};
    return cap;
}

ParametricPatch make_cap_on_plane(double r, double h) {
    if (!(std::abs(h) < r)) throw GeometryError("make_cap_on_plane: need |h| < r");
    auto map = std::make_shared<CapOnPlaneMap>();
    map->r = r;
    map->h = h;
    map->amax = std::acos(-h / r);
    return positively_oriented(ParametricPatch(SpaceForm::euclidean(), Domain::disk(1.0),
                                               std::move(map)));
}

ParametricPatch make_wavy_patch(double r, double chart_scale, double amplitude) {
    auto map = std::make_shared<WavyPatchMap>();
    map->a = r;
    map->b = 1.2 * r;
    map->c = 0.85 * r;
    map->s = chart_scale;
    map->amp = amplitude;
    return positively_oriented(ParametricPatch(SpaceForm::euclidean(), Domain::disk(1.0),
                                               std::move(map)));
}

ParametricPatch make_monkey_saddle(double scale, double radius) {
    return ParametricPatch(SpaceForm::euclidean(), Domain::disk(radius),
                           std::make_shared<MonkeySaddleMap>(scale));
}

ParametricPatch make_sphere_band(double r, double alpha0, double alpha1) {
    if (!(0 < alpha0 && alpha0 < alpha1 && alpha1 < M_PI))
        throw GeometryError("make_sphere_band: need 0 < alpha0 < alpha1 < pi");
    // Reuse the polar chart with alpha = rho on an annulus domain.
    ParametricPatch p(SpaceForm::euclidean(), Domain::annulus(alpha0, alpha1),
                      std::make_shared<SpherePolarMap>(r, Eigen::Vector3d::Zero(), 1.0));
    return p;
}

} // namespace curvatura
