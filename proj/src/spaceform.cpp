#include "curvatura/spaceform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvatura/errors.hpp"

namespace curvatura {

namespace {
constexpr double kSmallCurvature = 1e-8;
}

double sn(double c, double rho) {
    if (std::abs(c) < kSmallCurvature) {
        // 4-term Taylor; avoids cancellation and keeps sn continuous in c.
        const double x = c * rho * rho;
        return rho * (1.0 + x * (-1.0 / 6 + x * (1.0 / 120 - x / 5040)));
    }
    if (c > 0) return std::sin(rho * std::sqrt(c)) / std::sqrt(c);
    return std::sinh(rho * std::sqrt(-c)) / std::sqrt(-c);
}

double cn(double c, double rho) {
    if (std::abs(c) < kSmallCurvature) {
        const double x = c * rho * rho;
        return 1.0 + x * (-1.0 / 2 + x * (1.0 / 24 - x / 720));
    }
    if (c > 0) return std::cos(rho * std::sqrt(c));
    return std::cosh(rho * std::sqrt(-c));
}

std::vector<double> SpaceForm::signature() const {
    if (c_ == 0) return {1, 1, 1};
    if (c_ > 0) return {1, 1, 1, 1};
    return {1, 1, 1, -1};
}

double SpaceForm::inner(const Eigen::Vector4d& u, const Eigen::Vector4d& v) const {
    double s = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    if (c_ < 0) s -= u[3] * v[3];
    else if (c_ > 0) s += u[3] * v[3];
    return s;
}

Jet3 SpaceForm::inner(const Jet4v& u, const Jet4v& v) const {
    Jet3 s = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    if (c_ < 0) s = s - u[3] * v[3];
    else if (c_ > 0) s = s + u[3] * v[3];
    return s;
}

double SpaceForm::inner_checked(const std::vector<double>& u, const std::vector<double>& v) const {
    const size_t d = static_cast<size_t>(model_dim());
    if (u.size() != d || v.size() != d)
        throw GeometryError("ambient_inner: expected vectors of dimension " + std::to_string(d));
    Eigen::Vector4d a = Eigen::Vector4d::Zero(), b = Eigen::Vector4d::Zero();
    for (size_t i = 0; i < d; ++i) { a[i] = u[i]; b[i] = v[i]; }
    return inner(a, b);
}

Eigen::Vector4d SpaceForm::cross(const Eigen::Vector4d& a, const Eigen::Vector4d& b) const {
    Eigen::Vector4d w = Eigen::Vector4d::Zero();
    w[0] = a[1] * b[2] - a[2] * b[1];
    w[1] = a[2] * b[0] - a[0] * b[2];
    w[2] = a[0] * b[1] - a[1] * b[0];
    return w;
}

Eigen::Vector4d SpaceForm::cross(const Eigen::Vector4d& a, const Eigen::Vector4d& b,
                                 const Eigen::Vector4d& c) const {
    // w_i * sig_i = det(a, b, c, e_i) = cofactor along the last column.
    Eigen::Vector4d w;
    Eigen::Matrix3d m;
    for (int i = 0; i < 4; ++i) {
        int r = 0;
        for (int k = 0; k < 4; ++k) {
            if (k == i) continue;
            m(r, 0) = a[k];
            m(r, 1) = b[k];
            m(r, 2) = c[k];
            ++r;
        }
        const double sign = ((3 + i) % 2 == 0) ? 1.0 : -1.0; // (-1)^{i+4}, 0-based
        w[i] = sign * m.determinant();
    }
    if (c_ < 0) w[3] = -w[3]; // raise the index against the Minkowski metric
    return w;
}

Eigen::Vector4d SpaceForm::cross(const std::vector<Eigen::Vector4d>& vectors) const {
    if (model_dim() == 3) {
        if (vectors.size() != 2)
            throw GeometryError("cross_product: model_dim 3 takes exactly 2 vectors");
        return cross(vectors[0], vectors[1]);
    }
    if (vectors.size() != 3)
        throw GeometryError("cross_product: model_dim 4 takes exactly 3 vectors");
    return cross(vectors[0], vectors[1], vectors[2]);
}

Jet4v SpaceForm::cross(const Jet4v& a, const Jet4v& b) const {
    Jet4v w;
    w[0] = a[1] * b[2] - a[2] * b[1];
    w[1] = a[2] * b[0] - a[0] * b[2];
    w[2] = a[0] * b[1] - a[1] * b[0];
    w[3] = Jet3(0.0);
    return w;
}

Jet4v SpaceForm::cross(const Jet4v& a, const Jet4v& b, const Jet4v& c) const {
    auto det3 = [](const Jet3& m00, const Jet3& m01, const Jet3& m02,
                   const Jet3& m10, const Jet3& m11, const Jet3& m12,
                   const Jet3& m20, const Jet3& m21, const Jet3& m22) {
        return m00 * (m11 * m22 - m12 * m21) - m01 * (m10 * m22 - m12 * m20) +
               m02 * (m10 * m21 - m11 * m20);
    };
    Jet4v w;
    for (int i = 0; i < 4; ++i) {
        Jet3 rows[3][3];
        int r = 0;
        for (int k = 0; k < 4; ++k) {
            if (k == i) continue;
            rows[r][0] = a[k];
            rows[r][1] = b[k];
            rows[r][2] = c[k];
            ++r;
        }
        const double sign = ((3 + i) % 2 == 0) ? 1.0 : -1.0;
        w[i] = sign * det3(rows[0][0], rows[0][1], rows[0][2],
                           rows[1][0], rows[1][1], rows[1][2],
                           rows[2][0], rows[2][1], rows[2][2]);
    }
    if (c_ < 0) w[3] = -w[3];
    return w;
}

double SpaceForm::model_residual(const Eigen::Vector4d& x) const {
    if (c_ == 0) return std::abs(x[3]);
    const double target = 1.0 / c_;
    double r = std::abs(inner(x, x) - target);
    if (c_ < 0 && x[3] <= 0) r = std::max(r, std::abs(x[3]) + 1.0);
    return r;
}

Eigen::Vector4d SpaceForm::base_point() const {
    Eigen::Vector4d x = Eigen::Vector4d::Zero();
    if (c_ != 0) x[3] = 1.0 / std::sqrt(std::abs(c_));
    return x;
}

double SpaceForm::distance(const Eigen::Vector4d& x, const Eigen::Vector4d& y) const {
    if (c_ == 0) return (x - y).norm();
    const double p = c_ * inner(x, y);
    if (c_ > 0) return std::acos(std::clamp(p, -1.0, 1.0)) / std::sqrt(c_);
    return std::acosh(std::max(p, 1.0)) / std::sqrt(-c_);
}

Eigen::Vector4d SpaceForm::exponential(const Eigen::Vector4d& x, const Eigen::Vector4d& w) const {
    if (c_ == 0) {
        Eigen::Vector4d y = x + w;
        y[3] = 0;
        return y;
    }
    const double s = norm(w);
    if (s == 0) return x;
    return cn(c_, s) * x + sn(c_, s) * (w / s);
}

BallGeometry ball_geometry(const SpaceForm& sf, double R) {
    const double c = sf.curvature();
    const double Rc = c > 0 ? M_PI / (2 * std::sqrt(c)) : std::numeric_limits<double>::infinity();
    if (!(R > 0) || !(R < Rc))
        throw GeometryError("ball_geometry: radius outside the convexity range (0, R_c)");
    BallGeometry g;
    g.radius = R;
    const double ratio = cn(c, R) / sn(c, R);
    g.boundary_second_fundamental = -ratio;
    g.boundary_geodesic_curvature = ratio;
    return g;
}

} // namespace curvatura
