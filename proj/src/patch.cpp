#include "curvatura/patch.hpp"

#include <cmath>

#include "curvatura/errors.hpp"

namespace curvatura {

bool Domain::contains(const Eigen::Vector2d& p, double tol) const {
    switch (kind) {
        case DomainKind::Rectangle:
            return p[0] >= u0 - tol && p[0] <= u1 + tol && p[1] >= v0 - tol && p[1] <= v1 + tol;
        case DomainKind::Disk:
            return p.norm() <= radius + tol;
        case DomainKind::Annulus:
            return p.norm() >= r_inner - tol && p.norm() <= r_outer + tol;
    }
    return false;
}

double Domain::diameter() const {
    switch (kind) {
        case DomainKind::Rectangle:
            return std::hypot(u1 - u0, v1 - v0);
        case DomainKind::Disk:
            return 2 * radius;
        case DomainKind::Annulus:
            return 2 * r_outer;
    }
    return 1;
}

FiniteDifferenceMap::FiniteDifferenceMap(PositionFn fn, int ambient_dim, double step)
    : fn_(std::move(fn)), dim_(ambient_dim), h_(step) {}

void FiniteDifferenceMap::eval(const Jet3& uj, const Jet3& vj, Jet4v& out) const {
    const double u = uj.v, v = vj.v, h = h_;
    // 4th-order centered stencils on a 5x5 star.
    auto P = [&](int i, int j) { return fn_(u + i * h, v + j * h); };
    const Eigen::Vector4d p00 = P(0, 0);

    auto d1 = [&](auto f) { // f(i) samples along one axis
        return (f(-2) - 8 * f(-1) + 8 * f(1) - f(2)) / (12 * h);
    };
    auto d2 = [&](auto f) {
        return (-f(-2) + 16 * f(-1) - 30 * f(0) + 16 * f(1) - f(2)) / (12 * h * h);
    };
    auto d3 = [&](auto f) { // 2nd-order stencil is enough for the cubic term
        return (f(2) - 2 * f(1) + 2 * f(-1) - f(-2)) / (2 * h * h * h);
    };

    auto fu = [&](int i) { return P(i, 0); };
    auto fv = [&](int j) { return P(0, j); };

    const Eigen::Vector4d pu = d1(fu), pv = d1(fv);
    const Eigen::Vector4d puu = d2(fu), pvv = d2(fv);
    const Eigen::Vector4d puuu = d3(fu), pvvv = d3(fv);

    // Mixed derivatives from diagonal stencils.
    auto Pd = [&](int i, int j) { return P(i, j); };
    Eigen::Vector4d puv = (Pd(1, 1) - Pd(1, -1) - Pd(-1, 1) + Pd(-1, -1)) / (4 * h * h);
    // d/dv of the u-second-derivative, d/du of the v-second-derivative.
    auto puu_at = [&](int j) {
        return (-P(-2, j) + 16 * P(-1, j) - 30 * P(0, j) + 16 * P(1, j) - P(2, j)) / (12 * h * h);
    };
    auto pvv_at = [&](int i) {
        return (-P(i, -2) + 16 * P(i, -1) - 30 * P(i, 0) + 16 * P(i, 1) - P(i, 2)) / (12 * h * h);
    };
    Eigen::Vector4d puuv = (puu_at(1) - puu_at(-1)) / (2 * h);
    Eigen::Vector4d puvv = (pvv_at(1) - pvv_at(-1)) / (2 * h);

    for (int k = 0; k < 4; ++k) {
        Jet3 base;
        base.v = p00[k];
        base.du = pu[k]; base.dv = pv[k];
        base.duu = puu[k]; base.duv = puv[k]; base.dvv = pvv[k];
        base.duuu = puuu[k]; base.duuv = puuv[k]; base.duvv = puvv[k]; base.dvvv = pvvv[k];
        // Chain through the incoming jets (usually plain variables, but keep
        // generality for composed evaluation).
        Jet3 res(base.v);
        res.du = base.du * uj.du + base.dv * vj.du;
        res.dv = base.du * uj.dv + base.dv * vj.dv;
        res.duu = base.duu * uj.du * uj.du + 2 * base.duv * uj.du * vj.du +
                  base.dvv * vj.du * vj.du + base.du * uj.duu + base.dv * vj.duu;
        res.duv = base.duu * uj.du * uj.dv + base.duv * (uj.du * vj.dv + uj.dv * vj.du) +
                  base.dvv * vj.du * vj.dv + base.du * uj.duv + base.dv * vj.duv;
        res.dvv = base.duu * uj.dv * uj.dv + 2 * base.duv * uj.dv * vj.dv +
                  base.dvv * vj.dv * vj.dv + base.du * uj.dvv + base.dv * vj.dvv;
        res.duuu = base.duuu; res.duuv = base.duuv; res.duvv = base.duvv; res.dvvv = base.dvvv;
        out[k] = res;
    }
}

ParametricPatch::ParametricPatch(SpaceForm sf, Domain domain,
                                 std::shared_ptr<const PatchMap> map, double orientation_sign)
    : sf_(sf), domain_(domain), map_(std::move(map)), orientation_sign_(orientation_sign) {
    if (map_->ambient_dim() != sf_.model_dim())
        throw GeometryError("ParametricPatch: map dimension does not match the space form model");
}

ParametricPatch ParametricPatch::with_orientation(double sign) const {
    ParametricPatch p(sf_, domain_, map_, sign);
    p.closed_surface_euler = closed_surface_euler;
    return p;
}

Jet4v ParametricPatch::eval(double u, double v) const {
    Jet4v out;
    map_->eval(Jet3::var_u(u), Jet3::var_v(v), out);
    return out;
}

Eigen::Vector4d ParametricPatch::position(double u, double v) const {
    const Jet4v j = eval(u, v);
    return {j[0].v, j[1].v, j[2].v, j[3].v};
}

void ParametricPatch::validate(int n, double model_tol) const {
    auto check = [&](double u, double v) {
        const Jet4v j = eval(u, v);
        const Eigen::Vector4d x(j[0].v, j[1].v, j[2].v, j[3].v);
        if (sf_.model_residual(x) > model_tol)
            throw GeometryError("patch point off the model at (" + std::to_string(u) + ", " +
                                std::to_string(v) + ")");
        Eigen::Vector4d xu(j[0].du, j[1].du, j[2].du, j[3].du);
        Eigen::Vector4d xv(j[0].dv, j[1].dv, j[2].dv, j[3].dv);
        const double E = sf_.inner(xu, xu), F = sf_.inner(xu, xv), G = sf_.inner(xv, xv);
        if (!(E * G - F * F > 1e-14 * (1 + E) * (1 + G)))
            throw GeometryError("patch is not an immersion at (" + std::to_string(u) + ", " +
                                std::to_string(v) + ")");
    };
    for (int i = 0; i <= n; ++i) {
        for (int k = 0; k <= n; ++k) {
            const double a = double(i) / n, b = double(k) / n;
            switch (domain_.kind) {
                case DomainKind::Rectangle:
                    check(domain_.u0 + a * (domain_.u1 - domain_.u0),
                          domain_.v0 + b * (domain_.v1 - domain_.v0));
                    break;
                case DomainKind::Disk: {
                    const double r = a * domain_.radius * 0.999, th = 2 * M_PI * b;
                    check(r * std::cos(th), r * std::sin(th));
                    break;
                }
                case DomainKind::Annulus: {
                    const double r = domain_.r_inner + a * (domain_.r_outer - domain_.r_inner);
                    const double th = 2 * M_PI * b;
                    check(r * std::cos(th), r * std::sin(th));
                    break;
                }
            }
        }
    }
}

} // namespace curvatura
