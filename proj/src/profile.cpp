#include "curvatura/profile.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "curvatura/errors.hpp"

namespace curvatura {

namespace {

using State = std::array<double, 3>; // rho, z, psi

struct ProfileOde {
    double H2;
    void operator()(const State& x, State& dxds, double /*s*/) const {
        dxds[0] = std::cos(x[2]);
        dxds[1] = std::sin(x[2]);
        dxds[2] = H2 * x[0] / std::sin(x[2]);
    }
};

struct Trajectory {
    std::vector<ProfileSample> samples;
    bool hit_axis = false;       // rho -> 0
    bool hit_horizontal = false; // sin(psi) -> 0 with rho > 0
    std::vector<double> vertical_heights; // z where cos(psi) = 0 (interior events)
};

// Adaptive Dormand-Prince integration with event detection on cos(psi) = 0
// and termination at the axis or at a horizontal tangent.
Trajectory integrate(double H2, double rho0, double psi0, double s_span) {
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-9, 1e-9);
    ProfileOde rhs{H2};

    Trajectory out;
    State x{rho0, 0.0, psi0};
    double s = 0;
    double ds = 1e-3;
    out.samples.push_back({s, x[0], x[1], x[2]});

    const double sin_floor = 1e-5, rho_floor = 1e-7;
    int guard = 0;
    while (s < s_span && guard++ < 2000000) {
        State xprev = x;
        double sprev = s;
        ode::controlled_step_result res;
        do {
            res = stepper.try_step(rhs, x, s, ds);
        } while (res == ode::fail);
        ds = std::min(ds, s_span / 64);

        // Vertical-tangent event: cos(psi) changes sign inside the step.
        if (std::cos(xprev[2]) * std::cos(x[2]) < 0) {
            // Bisect with small RK4 substeps from the bracket start.
            double a = sprev, b = s;
            State xa = xprev;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (a + b);
                State xm = xa;
                double t = a;
                const int nsub = 8;
                const double h = (mid - a) / nsub;
                ode::runge_kutta4<State> rk4;
                for (int kk = 0; kk < nsub; ++kk) {
                    rk4.do_step(rhs, xm, t, h);
                    t += h;
                }
                if (std::cos(xa[2]) * std::cos(xm[2]) <= 0) {
                    b = mid;
                } else {
                    a = mid;
                    xa = xm;
                }
            }
            out.vertical_heights.push_back(xa[1]);
        }

        out.samples.push_back({s, x[0], x[1], x[2]});
        if (x[0] < rho_floor) {
            out.hit_axis = true;
            break;
        }
        if (std::abs(std::sin(x[2])) < sin_floor) {
            out.hit_horizontal = true;
            break;
        }
    }
    return out;
}

// Piecewise-quintic Hermite profile with endpoint data consistent with the
// ODE: rho'' = -H2 rho, z'' = H2 rho cos(psi)/sin(psi).
struct RotationalMap : PatchMap {
    std::vector<double> s_knots;
    std::vector<std::array<double, 3>> rho_data, z_data; // value, d1, d2 at knots

    static void hermite_basis(const Jet3& t, Jet3 H[6]) {
        const Jet3 t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        H[0] = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        H[1] = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        H[2] = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
        H[3] = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        H[4] = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        H[5] = 0.5 * t3 - t4 + 0.5 * t5;
    }

    int ambient_dim() const override { return 3; }
    void eval(const Jet3& sj, const Jet3& u, Jet4v& out) const override {
        // Locate the knot interval of s.v.
        int lo = 0, hi = static_cast<int>(s_knots.size()) - 2;
        while (lo < hi) {
            const int mid = (lo + hi + 1) / 2;
            if (s_knots[mid] <= sj.v) lo = mid;
            else hi = mid - 1;
        }
        const double sa = s_knots[lo], sb = s_knots[lo + 1], h = sb - sa;
        const Jet3 t = (sj - sa) / h;
        Jet3 H[6];
        hermite_basis(t, H);
        auto interp = [&](const std::array<double, 3>& A, const std::array<double, 3>& B) {
            return A[0] * H[0] + h * A[1] * H[1] + h * h * A[2] * H[2] + B[0] * H[3] +
                   h * B[1] * H[4] + h * h * B[2] * H[5];
        };
        const Jet3 rho = interp(rho_data[lo], rho_data[lo + 1]);
        const Jet3 z = interp(z_data[lo], z_data[lo + 1]);
        out = {rho * cos(u), rho * sin(u), z, Jet3(0.0)};
    }
};

} // namespace

RotationalProfile rotational_h2_profile(const SpaceForm& sf, double H2, double rho0, double psi0,
                                        const ShootingOptions& opts) {
    if (sf.curvature() != 0)
        throw GeometryError("rotational_h2_profile: Euclidean space form required");
    if (!(H2 > 0)) throw GeometryError("rotational_h2_profile: H2 must be positive");
    if (!(rho0 > 0)) throw GeometryError("rotational_h2_profile: seed radius must be positive");

    const double span =
        opts.s_span > 0 ? opts.s_span : 1.2 * M_PI / std::sqrt(H2); // radius period is pi/sqrt(H2)

    RotationalProfile prof;
    prof.H2 = H2;
    Trajectory base = integrate(H2, rho0, psi0, span);
    if (base.samples.size() < 8)
        throw SolverError("rotational_h2_profile: ODE terminated immediately");
    prof.samples = base.samples;
    prof.s_min = base.samples.front().s;
    prof.s_max = base.samples.back().s;
    prof.vertical_tangent_heights = base.vertical_heights;
    prof.closed_at_pole = base.hit_axis && std::abs(rho0 * std::sqrt(H2) - 1) < 1e-6;

    if (base.vertical_heights.size() >= 2) {
        prof.shooting_converged = true;
        prof.outcome = "two vertical tangents on the seed trajectory";
        return prof;
    }

    // Launch-angle scan: look for a trajectory with two vertical tangents.
    int best_events = static_cast<int>(base.vertical_heights.size());
    for (int it = 0; it < opts.max_iterations; ++it) {
        const double frac = (it + 1.0) / (opts.max_iterations + 1.0);
        const double psi = M_PI * (0.12 + 0.76 * frac);
        Trajectory t = integrate(H2, rho0, psi, span);
        best_events = std::max(best_events, static_cast<int>(t.vertical_heights.size()));
        if (t.vertical_heights.size() >= 2) {
            prof.shooting_converged = true;
            prof.samples = t.samples;
            prof.s_min = t.samples.front().s;
            prof.s_max = t.samples.back().s;
            prof.vertical_tangent_heights = t.vertical_heights;
            prof.outcome = "shooting found two vertical tangents";
            return prof;
        }
    }
    prof.shooting_converged = false;
    prof.outcome = prof.closed_at_pole
                       ? "profile closes smoothly at the axis (sphere family); no second "
                         "vertical tangent"
                       : "no launch angle produced two vertical tangents (max " +
                             std::to_string(best_events) + " events)";
    return prof;
}

ParametricPatch make_rotational_patch(const RotationalProfile& profile, double s0, double s1) {
    if (!(s0 >= profile.s_min - 1e-12) || !(s1 <= profile.s_max + 1e-12) || !(s0 < s1))
        throw GeometryError("make_rotational_patch: [s0, s1] outside the integrated range");

    auto map = std::make_shared<RotationalMap>();
    const double H2 = profile.H2;
    for (const auto& smp : profile.samples) {
        map->s_knots.push_back(smp.s);
        const double cp = std::cos(smp.psi), sp = std::sin(smp.psi);
        map->rho_data.push_back({smp.rho, cp, -H2 * smp.rho});
        map->z_data.push_back({smp.z, sp, H2 * smp.rho * cp / sp});
    }
    ParametricPatch p(SpaceForm::euclidean(), Domain::rectangle(s0, s1, 0, 2 * M_PI),
                      std::move(map));
    return p;
}

} // namespace curvatura
