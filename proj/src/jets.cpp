#include "curvatura/jets.hpp"

namespace curvatura {

namespace {

// Value and first three t-derivatives of sum_n a_n t^n. Convergence is fast
// for the arguments that occur in cap charts (|k^2 t| of order a few).
struct Series {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
};

template <typename CoefFn>
Series sum_series(double t, CoefFn an, int nmax) {
    Series s;
    double p = 1, pm1 = 0, pm2 = 0, pm3 = 0; // t^n, t^{n-1}, t^{n-2}, t^{n-3}
    for (int n = 0; n <= nmax; ++n) {
        const double a = an(n);
        s.s0 += a * p;
        s.s1 += a * n * pm1;
        s.s2 += a * n * (n - 1) * pm2;
        s.s3 += a * n * (n - 1) * (n - 2) * pm3;
        pm3 = pm2;
        pm2 = pm1;
        pm1 = p;
        p *= t;
    }
    return s;
}

} // namespace

Jet3 cos_sqrt(const Jet3& t, double k, double sign) {
    // cos(k sqrt t) = sum (-1)^n k^{2n} t^n / (2n)!; cosh for sign = -1.
    const double k2 = k * k;
    auto an = [&](int n) {
        double a = 1;
        for (int m = 1; m <= n; ++m) a *= (sign > 0 ? -1.0 : 1.0) * k2 / ((2.0 * m - 1) * (2.0 * m));
        return a;
    };
    Series s = sum_series(t.v, an, 24);
    return jet_compose(t, s.s0, s.s1, s.s2, s.s3);
}

Jet3 sinc_sqrt(const Jet3& t, double k, double sign) {
    // sin(k sqrt t)/sqrt t = k sum (-1)^n k^{2n} t^n / (2n+1)!; sinh for sign = -1.
    const double k2 = k * k;
    auto an = [&](int n) {
        double a = k;
        for (int m = 1; m <= n; ++m) a *= (sign > 0 ? -1.0 : 1.0) * k2 / ((2.0 * m) * (2.0 * m + 1));
        return a;
    };
    Series s = sum_series(t.v, an, 24);
    return jet_compose(t, s.s0, s.s1, s.s2, s.s3);
}

} // namespace curvatura
