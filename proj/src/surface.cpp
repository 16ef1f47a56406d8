#include "curvatura/surface.hpp"

#include <cmath>
#include <limits>

#include "curvatura/errors.hpp"

namespace curvatura {

namespace {

Eigen::Vector4d value_of(const Jet4v& j) { return {j[0].v, j[1].v, j[2].v, j[3].v}; }

Jet4v jet_derive_u(const Jet4v& j) {
    return {derive_u(j[0]), derive_u(j[1]), derive_u(j[2]), derive_u(j[3])};
}
Jet4v jet_derive_v(const Jet4v& j) {
    return {derive_v(j[0]), derive_v(j[1]), derive_v(j[2]), derive_v(j[3])};
}

// Eigendecomposition of a symmetric 2x2 matrix; lambda1 >= lambda2, dir1 is
// the lambda1 eigendirection (unit). At an exact tie the direction defaults
// to (1, 0); downstream line-field code tolerates the frame ambiguity.
void sym_eig2(const Eigen::Matrix2d& S, double& l1, double& l2, Eigen::Vector2d& dir1) {
    const double a = S(0, 0), b = S(0, 1), d = S(1, 1);
    const double mean = 0.5 * (a + d);
    const double diff = 0.5 * (a - d);
    const double r = std::hypot(diff, b);
    l1 = mean + r;
    l2 = mean - r;
    if (r < 1e-300) {
        dir1 = Eigen::Vector2d(1, 0);
        return;
    }
    Eigen::Vector2d c1(b, l1 - a), c2(l1 - d, b);
    dir1 = (c1.squaredNorm() >= c2.squaredNorm()) ? c1 : c2;
    const double n = dir1.norm();
    dir1 = (n > 0) ? Eigen::Vector2d(dir1 / n) : Eigen::Vector2d(1, 0);
}

} // namespace

std::array<double, 3> verify_newton_identities(const SurfaceJet& jet) {
    const Eigen::Matrix2d A = jet.shape;
    const Eigen::Matrix2d P1 = jet.newton_coord();
    return {std::abs(P1.trace() - 2 * jet.H1),
            std::abs((P1 * A).trace() - 2 * jet.H2),
            std::abs((P1 * A * A).trace() - 2 * jet.H1 * jet.H2)};
}

Jet4v jet_unit_normal(const SpaceForm& sf, const Jet4v& pos, double orientation_sign) {
    const Jet4v Du = jet_derive_u(pos);
    const Jet4v Dv = jet_derive_v(pos);
    Jet4v nraw;
    if (sf.model_dim() == 3) {
        nraw = sf.cross(Du, Dv);
    } else {
        nraw = sf.cross(Du, Dv, pos);
    }
    const Jet3 nn = sf.inner(nraw, nraw);
    if (!(nn.v > 0))
        throw GeometryError("jet_unit_normal: normal direction is not spacelike");
    const Jet3 inv_len = reciprocal(sqrt(nn)) * orientation_sign;
    return inv_len * nraw;
}

ExtendedJet evaluate_extended(const ParametricPatch& patch, double u, double v) {
    const SpaceForm& sf = patch.space_form();
    ExtendedJet ex;
    ex.pos = patch.eval(u, v);

    const Jet4v Du = jet_derive_u(ex.pos);
    const Jet4v Dv = jet_derive_v(ex.pos);

    ex.E = sf.inner(Du, Du);
    ex.F = sf.inner(Du, Dv);
    ex.G = sf.inner(Dv, Dv);

    const double E = ex.E.v, F = ex.F.v, G = ex.G.v;
    const double det_g = E * G - F * F;
    if (!(det_g > 1e-14 * (1 + std::abs(E)) * (1 + std::abs(G))))
        throw GeometryError("evaluate_jet: degenerate metric (non-immersion) at (" +
                            std::to_string(u) + ", " + std::to_string(v) + ")");

    ex.normal = jet_unit_normal(sf, ex.pos, patch.orientation_sign());

    SurfaceJet& j = ex.jet;
    j.param = Eigen::Vector2d(u, v);
    j.position = value_of(ex.pos);
    j.normal = value_of(ex.normal);
    j.tangent_u = value_of(Du);
    j.tangent_v = value_of(Dv);
    j.metric << E, F, F, G;
    j.sqrt_det_g = std::sqrt(det_g);

    const Jet4v Duu = jet_derive_u(Du);
    const Jet4v Duv = jet_derive_v(Du);
    const Jet4v Dvv = jet_derive_v(Dv);
    const Jet3 e = sf.inner(Duu, ex.normal);
    const Jet3 f = sf.inner(Duv, ex.normal);
    const Jet3 g2 = sf.inner(Dvv, ex.normal);
    j.second_ff << e.v, f.v, f.v, g2.v;

    Eigen::Matrix2d ginv;
    ginv << G, -F, -F, E;
    ginv /= det_g;
    j.shape = ginv * j.second_ff;

    // Cholesky of the metric.
    const double l11 = std::sqrt(E);
    const double l21 = F / l11;
    const double l22 = std::sqrt(std::max(det_g / E, 0.0));
    j.chol_L << l11, 0, l21, l22;
    Eigen::Matrix2d Linv;
    Linv << 1 / l11, 0, -l21 / (l11 * l22), 1 / l22;
    j.shape_on = Linv * j.second_ff * Linv.transpose();
    j.shape_on = 0.5 * (j.shape_on + j.shape_on.transpose()).eval();

    sym_eig2(j.shape_on, j.kappa1, j.kappa2, j.principal_dir_on);
    j.H1 = 0.5 * (j.kappa1 + j.kappa2);
    j.H2 = j.kappa1 * j.kappa2;
    j.umbilicity_defect = j.kappa1 - j.kappa2;
    j.newton_on = 2 * j.H1 * Eigen::Matrix2d::Identity() - j.shape_on;

    // Christoffel symbols from first metric derivatives.
    const double dg[2][2][2] = {{{ex.E.du, ex.E.dv}, {ex.F.du, ex.F.dv}},
                                {{ex.F.du, ex.F.dv}, {ex.G.du, ex.G.dv}}};
    ex.metric_inv = ginv;
    for (int k = 0; k < 2; ++k) {
        Eigen::Matrix2d gam;
        for (int i = 0; i < 2; ++i)
            for (int jj = 0; jj < 2; ++jj) {
                double s = 0;
                for (int l = 0; l < 2; ++l)
                    s += ginv(k, l) * (dg[jj][l][i] + dg[i][l][jj] - dg[i][jj][l]);
                gam(i, jj) = 0.5 * s;
            }
        if (k == 0) ex.gamma_u = gam;
        else ex.gamma_v = gam;
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (patch.jet_order() >= 3) {
        // Brioschi intrinsic curvature from the metric 2-jet.
        const double Eu = ex.E.du, Ev = ex.E.dv, Evv = ex.E.dvv;
        const double Fu = ex.F.du, Fv = ex.F.dv, Fuv = ex.F.duv;
        const double Gu = ex.G.du, Gv = ex.G.dv, Guu = ex.G.duu;
        Eigen::Matrix3d M1, M2;
        M1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,
              Fv - 0.5 * Gu, E, F,
              0.5 * Gv, F, G;
        M2 << 0, 0.5 * Ev, 0.5 * Gu,
              0.5 * Ev, E, F,
              0.5 * Gu, F, G;
        j.gauss_intrinsic = (M1.determinant() - M2.determinant()) / (det_g * det_g);

        // First derivatives of H1, H2 from the order-1 jets of shape entries.
        const Jet3 detg_jet = (ex.E * ex.G - ex.F * ex.F).truncated2();
        const Jet3 H2_jet = (e * g2 - f * f) / detg_jet;
        const Jet3 H1_jet = (e * ex.G - 2.0 * f * ex.F + g2 * ex.E) / (2.0 * detg_jet);
        ex.dH2 = Eigen::Vector2d(H2_jet.du, H2_jet.dv);
        ex.dH1 = Eigen::Vector2d(H1_jet.du, H1_jet.dv);
    } else {
        j.gauss_intrinsic = nan;
        ex.dH2 = Eigen::Vector2d(nan, nan);
        ex.dH1 = Eigen::Vector2d(nan, nan);
    }
    return ex;
}

SurfaceJet evaluate_jet(const ParametricPatch& patch, double u, double v) {
    return evaluate_extended(patch, u, v).jet;
}

Eigen::Matrix2d ExtendedJet::hessian(const Jet3& field) const {
    Eigen::Matrix2d H;
    H << field.duu, field.duv, field.duv, field.dvv;
    H -= gamma_u * field.du + gamma_v * field.dv;
    return H;
}

double ExtendedJet::L1(const Jet3& field) const {
    const Eigen::Matrix2d P1 = jet.newton_coord();
    return (P1 * metric_inv * hessian(field)).trace();
}

double ExtendedJet::laplacian(const Jet3& field) const {
    return (metric_inv * hessian(field)).trace();
}

Eigen::Vector2d ExtendedJet::surface_gradient_coords(const Jet3& field) const {
    return metric_inv * Eigen::Vector2d(field.du, field.dv);
}

Eigen::Vector4d ExtendedJet::surface_gradient(const Jet3& field) const {
    const Eigen::Vector2d c = surface_gradient_coords(field);
    return c[0] * jet.tangent_u + c[1] * jet.tangent_v;
}

std::vector<BoundaryCurve> boundary_curves(const Domain& domain) {
    std::vector<BoundaryCurve> out;
    switch (domain.kind) {
        case DomainKind::Disk: {
            BoundaryCurve b;
            b.component = 0;
            b.s_begin = 0;
            b.s_end = 2 * M_PI;
            const double R = domain.radius;
            b.point = [R](double s) { return Eigen::Vector2d(R * std::cos(s), R * std::sin(s)); };
            b.d1 = [R](double s) { return Eigen::Vector2d(-R * std::sin(s), R * std::cos(s)); };
            b.d2 = [R](double s) { return Eigen::Vector2d(-R * std::cos(s), -R * std::sin(s)); };
            b.outward = [](double s) { return Eigen::Vector2d(std::cos(s), std::sin(s)); };
            out.push_back(std::move(b));
            break;
        }
        case DomainKind::Annulus: {
            BoundaryCurve outer;
            outer.component = 0;
            outer.s_begin = 0;
            outer.s_end = 2 * M_PI;
            const double Ro = domain.r_outer, Ri = domain.r_inner;
            outer.point = [Ro](double s) { return Eigen::Vector2d(Ro * std::cos(s), Ro * std::sin(s)); };
            outer.d1 = [Ro](double s) { return Eigen::Vector2d(-Ro * std::sin(s), Ro * std::cos(s)); };
            outer.d2 = [Ro](double s) { return Eigen::Vector2d(-Ro * std::cos(s), -Ro * std::sin(s)); };
            outer.outward = [](double s) { return Eigen::Vector2d(std::cos(s), std::sin(s)); };
            out.push_back(std::move(outer));
            BoundaryCurve inner; // clockwise so the domain stays on the left
            inner.component = 1;
            inner.s_begin = 0;
            inner.s_end = 2 * M_PI;
            inner.point = [Ri](double s) { return Eigen::Vector2d(Ri * std::cos(-s), Ri * std::sin(-s)); };
            inner.d1 = [Ri](double s) { return Eigen::Vector2d(Ri * std::sin(-s), -Ri * std::cos(-s)); };
            inner.d2 = [Ri](double s) { return Eigen::Vector2d(-Ri * std::cos(-s), -Ri * std::sin(-s)); };
            inner.outward = [](double s) { return Eigen::Vector2d(-std::cos(-s), -std::sin(-s)); };
            out.push_back(std::move(inner));
            break;
        }
        case DomainKind::Rectangle: {
            BoundaryCurve b;
            b.component = 0;
            const double w = domain.u1 - domain.u0, h = domain.v1 - domain.v0;
            b.s_begin = 0;
            b.s_end = 2 * (w + h);
            const double u0 = domain.u0, u1 = domain.u1, v0 = domain.v0, v1 = domain.v1;
            b.corner_params = {0, w, w + h, 2 * w + h, 2 * (w + h)};
            b.point = [=](double s) -> Eigen::Vector2d {
                if (s < w) return {u0 + s, v0};
                if (s < w + h) return {u1, v0 + (s - w)};
                if (s < 2 * w + h) return {u1 - (s - w - h), v1};
                return {u0, v1 - (s - 2 * w - h)};
            };
            b.d1 = [=](double s) -> Eigen::Vector2d {
                if (s < w) return {1, 0};
                if (s < w + h) return {0, 1};
                if (s < 2 * w + h) return {-1, 0};
                return {0, -1};
            };
            b.d2 = [](double) { return Eigen::Vector2d(0, 0); };
            b.outward = [=](double s) -> Eigen::Vector2d {
                if (s < w) return {0, -1};
                if (s < w + h) return {1, 0};
                if (s < 2 * w + h) return {0, 1};
                return {-1, 0};
            };
            out.push_back(std::move(b));
            break;
        }
    }
    return out;
}

BoundaryJet evaluate_boundary_jet(const ParametricPatch& patch, int component, double s) {
    const auto curves = boundary_curves(patch.domain());
    if (component < 0 || component >= static_cast<int>(curves.size()))
        throw GeometryError("evaluate_boundary_jet: no boundary component " +
                            std::to_string(component));
    const BoundaryCurve& bc = curves[component];
    for (double cp : bc.corner_params)
        if (std::abs(s - cp) < 1e-12 * (1 + std::abs(cp)))
            throw GeometryError("evaluate_boundary_jet: tangent undefined at a domain corner");

    const Eigen::Vector2d p = bc.point(s), t = bc.d1(s), t2 = bc.d2(s), nrm = bc.outward(s);
    const SpaceForm& sf = patch.space_form();
    const ExtendedJet ex = evaluate_extended(patch, p[0], p[1]);
    const SurfaceJet& j = ex.jet;

    BoundaryJet bj;
    bj.param = p;
    bj.component = component;
    bj.s = s;
    bj.position = j.position;
    bj.normal = j.normal;
    bj.H1 = j.H1;

    // Ambient derivatives of the boundary curve.
    const Eigen::Vector4d Du = j.tangent_u, Dv = j.tangent_v;
    auto second = [&](int a, int b) {
        Eigen::Vector4d r;
        const Jet4v& P = ex.pos;
        for (int k = 0; k < 4; ++k) {
            const Jet3& q = P[k];
            const double vals[2][2] = {{q.duu, q.duv}, {q.duv, q.dvv}};
            r[k] = vals[a][b];
        }
        return r;
    };
    const Eigen::Vector4d c1 = Du * t[0] + Dv * t[1];
    Eigen::Vector4d c2 = second(0, 0) * t[0] * t[0] + 2 * second(0, 1) * t[0] * t[1] +
                         second(1, 1) * t[1] * t[1] + Du * t2[0] + Dv * t2[1];

    const double c1n2 = sf.inner(c1, c1);
    const Eigen::Vector4d T = c1 / std::sqrt(c1n2);
    bj.tangent = T;

    // Outward conormal: push the domain normal through the immersion and
    // orthogonalize against T.
    Eigen::Vector4d w = Du * nrm[0] + Dv * nrm[1];
    Eigen::Vector4d nu = w - sf.inner(w, T) * T;
    nu /= std::sqrt(sf.inner(nu, nu));
    bj.conormal = nu;

    const Eigen::Vector4d kvec = (c2 - sf.inner(c2, T) * T) / c1n2;
    bj.kappa_g = -sf.inner(kvec, nu);

    // Coordinate components of nu and T.
    Eigen::Matrix2d ginv = ex.metric_inv;
    bj.conormal_param = ginv * Eigen::Vector2d(sf.inner(nu, Du), sf.inner(nu, Dv));
    bj.tangent_param = ginv * Eigen::Vector2d(sf.inner(T, Du), sf.inner(T, Dv));

    bj.II_nn = bj.conormal_param.dot(j.second_ff * bj.conormal_param);
    bj.II_nt = bj.conormal_param.dot(j.second_ff * bj.tangent_param);
    bj.P1nu_norm = std::hypot(2 * j.H1 - bj.II_nn, bj.II_nt);
    return bj;
}

ParametricPatch orient_for_positivity(const ParametricPatch& patch, int n) {
    std::vector<Eigen::Vector2d> samples;
    const Domain& dom = patch.domain();
    for (int i = 0; i <= n; ++i) {
        for (int k = 0; k <= n; ++k) {
            const double a = double(i) / n, b = double(k) / n;
            switch (dom.kind) {
                case DomainKind::Rectangle:
                    samples.emplace_back(dom.u0 + a * (dom.u1 - dom.u0),
                                         dom.v0 + b * (dom.v1 - dom.v0));
                    break;
                case DomainKind::Disk: {
                    const double r = a * dom.radius * 0.98, th = 2 * M_PI * b;
                    samples.emplace_back(r * std::cos(th), r * std::sin(th));
                    break;
                }
                case DomainKind::Annulus: {
                    const double r = dom.r_inner + a * (dom.r_outer - dom.r_inner);
                    const double th = 2 * M_PI * b;
                    samples.emplace_back(r * std::cos(th), r * std::sin(th));
                    break;
                }
            }
        }
    }
    bool need_flip = false;
    bool first = true;
    for (const auto& p : samples) {
        const SurfaceJet j = evaluate_jet(patch, p[0], p[1]);
        if (!(j.H2 > 0))
            throw GeometryError("orient_for_positivity: H2 <= 0 at a sample point; "
                                "orientation cannot force positivity");
        if (first) {
            need_flip = j.kappa2 < 0;
            first = false;
        }
    }
    if (!need_flip) return patch;
    return patch.with_orientation(-patch.orientation_sign());
}

} // namespace curvatura
