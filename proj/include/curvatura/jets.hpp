#pragma once

#include <array>
#include <cmath>

namespace curvatura {

/// Truncated Taylor scalar carrying derivatives up to third order with
/// respect to two parameters (u, v). Arithmetic propagates exact chain and
/// product rules, so evaluating a closed-form map on Jet3 arguments yields
/// machine-precision partials without finite differencing.
struct Jet3 {
    double v = 0;
    double du = 0, dv = 0;
    double duu = 0, duv = 0, dvv = 0;
    double duuu = 0, duuv = 0, duvv = 0, dvvv = 0;

    Jet3() = default;
    Jet3(double value) : v(value) {}

    static Jet3 var_u(double value) {
        Jet3 j(value);
        j.du = 1;
        return j;
    }
    static Jet3 var_v(double value) {
        Jet3 j(value);
        j.dv = 1;
        return j;
    }

    /// Zero the third-order slots. Fields derived from first derivatives of a
    /// Jet3 (normals, metric entries) are only valid to second order; this
    /// keeps stale data out of downstream arithmetic.
    Jet3 truncated2() const {
        Jet3 j = *this;
        j.duuu = j.duuv = j.duvv = j.dvvv = 0;
        return j;
    }

    Jet3 operator-() const {
        Jet3 r;
        r.v = -v;
        r.du = -du; r.dv = -dv;
        r.duu = -duu; r.duv = -duv; r.dvv = -dvv;
        r.duuu = -duuu; r.duuv = -duuv; r.duvv = -duvv; r.dvvv = -dvvv;
        return r;
    }
};

inline Jet3 operator+(const Jet3& a, const Jet3& b) {
    Jet3 r;
    r.v = a.v + b.v;
    r.du = a.du + b.du; r.dv = a.dv + b.dv;
    r.duu = a.duu + b.duu; r.duv = a.duv + b.duv; r.dvv = a.dvv + b.dvv;
    r.duuu = a.duuu + b.duuu; r.duuv = a.duuv + b.duuv;
    r.duvv = a.duvv + b.duvv; r.dvvv = a.dvvv + b.dvvv;
    return r;
}

inline Jet3 operator-(const Jet3& a, const Jet3& b) { return a + (-b); }

inline Jet3 operator*(const Jet3& a, const Jet3& b) {
    Jet3 r;
    r.v = a.v * b.v;
    r.du = a.du * b.v + a.v * b.du;
    r.dv = a.dv * b.v + a.v * b.dv;
    r.duu = a.duu * b.v + 2 * a.du * b.du + a.v * b.duu;
    r.duv = a.duv * b.v + a.du * b.dv + a.dv * b.du + a.v * b.duv;
    r.dvv = a.dvv * b.v + 2 * a.dv * b.dv + a.v * b.dvv;
    r.duuu = a.duuu * b.v + 3 * a.duu * b.du + 3 * a.du * b.duu + a.v * b.duuu;
    r.duuv = a.duuv * b.v + a.duu * b.dv + 2 * a.duv * b.du + 2 * a.du * b.duv +
             a.dv * b.duu + a.v * b.duuv;
    r.duvv = a.duvv * b.v + a.dvv * b.du + 2 * a.duv * b.dv + 2 * a.dv * b.duv +
             a.du * b.dvv + a.v * b.duvv;
    r.dvvv = a.dvvv * b.v + 3 * a.dvv * b.dv + 3 * a.dv * b.dvv + a.v * b.dvvv;
    return r;
}

inline Jet3 operator*(double s, const Jet3& a) { return Jet3(s) * a; }
inline Jet3 operator*(const Jet3& a, double s) { return Jet3(s) * a; }
inline Jet3 operator+(double s, const Jet3& a) { return Jet3(s) + a; }
inline Jet3 operator+(const Jet3& a, double s) { return a + Jet3(s); }
inline Jet3 operator-(double s, const Jet3& a) { return Jet3(s) - a; }
inline Jet3 operator-(const Jet3& a, double s) { return a - Jet3(s); }

/// Compose a univariate function (given value and first three derivatives
/// at f.v) with the jet f.
inline Jet3 jet_compose(const Jet3& f, double h0, double h1, double h2, double h3) {
    Jet3 r;
    const double fu = f.du, fv = f.dv;
    r.v = h0;
    r.du = h1 * fu;
    r.dv = h1 * fv;
    r.duu = h2 * fu * fu + h1 * f.duu;
    r.duv = h2 * fu * fv + h1 * f.duv;
    r.dvv = h2 * fv * fv + h1 * f.dvv;
    r.duuu = h3 * fu * fu * fu + 3 * h2 * fu * f.duu + h1 * f.duuu;
    r.duuv = h3 * fu * fu * fv + h2 * (2 * fu * f.duv + fv * f.duu) + h1 * f.duuv;
    r.duvv = h3 * fu * fv * fv + h2 * (2 * fv * f.duv + fu * f.dvv) + h1 * f.duvv;
    r.dvvv = h3 * fv * fv * fv + 3 * h2 * fv * f.dvv + h1 * f.dvvv;
    return r;
}

inline Jet3 reciprocal(const Jet3& f) {
    const double x = f.v;
    return jet_compose(f, 1 / x, -1 / (x * x), 2 / (x * x * x), -6 / (x * x * x * x));
}

inline Jet3 operator/(const Jet3& a, const Jet3& b) { return a * reciprocal(b); }
inline Jet3 operator/(const Jet3& a, double s) { return a * (1.0 / s); }
inline Jet3 operator/(double s, const Jet3& b) { return s * reciprocal(b); }

inline Jet3 sqrt(const Jet3& f) {
    const double s = std::sqrt(f.v);
    return jet_compose(f, s, 0.5 / s, -0.25 / (s * f.v), 0.375 / (s * f.v * f.v));
}

inline Jet3 sin(const Jet3& f) {
    const double s = std::sin(f.v), c = std::cos(f.v);
    return jet_compose(f, s, c, -s, -c);
}

inline Jet3 cos(const Jet3& f) {
    const double s = std::sin(f.v), c = std::cos(f.v);
    return jet_compose(f, c, -s, -c, s);
}

inline Jet3 sinh(const Jet3& f) {
    const double s = std::sinh(f.v), c = std::cosh(f.v);
    return jet_compose(f, s, c, s, c);
}

inline Jet3 cosh(const Jet3& f) {
    const double s = std::sinh(f.v), c = std::cosh(f.v);
    return jet_compose(f, c, s, c, s);
}

inline Jet3 exp(const Jet3& f) {
    const double e = std::exp(f.v);
    return jet_compose(f, e, e, e, e);
}

inline Jet3 log(const Jet3& f) {
    const double x = f.v;
    return jet_compose(f, std::log(x), 1 / x, -1 / (x * x), 2 / (x * x * x));
}

inline Jet3 acos(const Jet3& f) {
    const double x = f.v, u = 1 - x * x;
    return jet_compose(f, std::acos(x), -1 / std::sqrt(u), -x / std::pow(u, 1.5),
                       -(1 + 2 * x * x) / std::pow(u, 2.5));
}

inline Jet3 acosh(const Jet3& f) {
    const double x = f.v, u = x * x - 1;
    return jet_compose(f, std::acosh(x), 1 / std::sqrt(u), -x / std::pow(u, 1.5),
                       (2 * x * x + 1) / std::pow(u, 2.5));
}

/// Quintic smoothstep in t over [t0, 1]: 0 below t0, 1 above 1, C^2 seams.
inline Jet3 smoothstep_quintic(const Jet3& t, double t0) {
    if (t.v <= t0) return Jet3(0.0);
    if (t.v >= 1.0 && t.du == 0 && t.dv == 0) return Jet3(1.0);
    const Jet3 x = (t - t0) / (1.0 - t0);
    if (x.v >= 1.0) return Jet3(1.0);
    return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

/// cos(k*sqrt(t)) as an entire function of t, by power series. Used by polar
/// cap charts where t = rho^2; the series form stays smooth through t = 0.
/// sign = +1 gives the trigonometric branch, -1 the hyperbolic one
/// (cosh(k*sqrt(t))).
Jet3 cos_sqrt(const Jet3& t, double k, double sign);

/// sin(k*sqrt(t))/sqrt(t) (entire in t), hyperbolic for sign = -1.
Jet3 sinc_sqrt(const Jet3& t, double k, double sign);

using Jet4v = std::array<Jet3, 4>;

inline Jet4v operator+(const Jet4v& a, const Jet4v& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
inline Jet4v operator-(const Jet4v& a, const Jet4v& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}
inline Jet4v operator*(const Jet3& s, const Jet4v& a) {
    return {s * a[0], s * a[1], s * a[2], s * a[3]};
}

/// Field of first u-derivatives of a Jet3, itself valid to second order.
inline Jet3 derive_u(const Jet3& f) {
    Jet3 r;
    r.v = f.du;
    r.du = f.duu; r.dv = f.duv;
    r.duu = f.duuu; r.duv = f.duuv; r.dvv = f.duvv;
    return r;
}

inline Jet3 derive_v(const Jet3& f) {
    Jet3 r;
    r.v = f.dv;
    r.du = f.duv; r.dv = f.dvv;
    r.duu = f.duuv; r.duv = f.duvv; r.dvv = f.dvvv;
    return r;
}

} // namespace curvatura
