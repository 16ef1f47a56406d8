#pragma once

#include "curvatura/assemble.hpp"
#include "curvatura/spectrum.hpp"

namespace curvatura {

/// Scalar field on the parameter domain, evaluable in jet arithmetic.
struct ScalarField {
    std::function<Jet3(const Jet3&, const Jet3&)> fn;
    Jet3 eval(const Jet3& u, const Jet3& v) const { return fn(u, v); }
    double value(double u, double v) const { return fn(Jet3(u), Jet3(v)).v; }
};

/// Normal variation Phi(p, t) = exp_{phi(p)}(t xi(p)) with variational field
/// xi = f eta + tangential (tangential given in coordinate components).
struct VariationSpec {
    std::shared_ptr<const ParametricPatch> base;
    ScalarField support;                                 // f(u, v)
    std::optional<std::array<ScalarField, 2>> tangential; // (t^u, t^v)
    double eps = 1e-2;

    /// Support body for admissibility projection of boundary points.
    SupportKind support_kind = SupportKind::None;
    double ball_radius = 1;
    std::vector<double> slab_planes; // z-values, matched per boundary component

    /// Blend a radial projection near the domain boundary so the boundary
    /// stays on the support body exactly for every t, without altering the
    /// time-0 variational field. Disk-domain patches only.
    bool enforce_admissibility = false;

    /// Extra normal motion t^2 g eta; g is chosen by the second-variation
    /// audit so the family is volume-preserving through second order.
    double quadratic_normal_correction = 0;
};

/// The immersion at time t as a patch (jets valid to order 2).
ParametricPatch varied_patch(const VariationSpec& var, double t);

/// Variational field xi_t at parameter point p and time t (closed form).
Eigen::Vector4d variation_field(const VariationSpec& var, const Eigen::Vector2d& p, double t);

/// Compares the central difference of H2(t) against
/// L1 f + 2 H1 H2 f + 2 c H1 f + xi^T(H2) at t = 0.
struct H2DerivativeAudit {
    double max_rel_error = 0;
    std::vector<double> fd, rhs;
};
H2DerivativeAudit h2_derivative_audit(const VariationSpec& var, const SpaceForm& sf,
                                      const std::vector<Eigen::Vector2d>& points, double h);

/// Signed swept volume between Sigma and Sigma_t, oriented so that
/// V'(0) = int f dmu.
double enclosed_volume(const VariationSpec& var, double t, int quad_resolution = 32);

/// Trace of the capillary functional F_{1,theta} along the variation.
struct FunctionalTrace {
    std::vector<double> t, F, V;
    std::vector<Eigen::Vector2d> h2_probes;
    std::vector<std::vector<double>> H2_samples; // per t, one entry per probe
    double max_projection_distance = 0;
    void export_csv(std::ostream& os) const; // columns t,F,V
};
FunctionalTrace functional_trace(const VariationSpec& var, const AssemblyConfig& cfg,
                                 const std::vector<double>& tgrid, int quad_resolution = 32);

/// Finite-difference audit of d/dt F_{1,theta}|_0 = I_{1,theta}(f, f): the
/// symmetric first difference of the F-trace against the assembled quadratic
/// form. The raw second difference is reported alongside.
struct SecondVariationAudit {
    double fd_slope = 0;       // (F(h) - F(-h)) / (2h)
    double fd_second = 0;      // (F(h) - 2 F(0) + F(-h)) / h^2
    double quadratic_form = 0; // I(f, f)
    double volume_rate = 0;    // V'(0), should vanish for mean-zero f
    double rel_error = 0;
};
SecondVariationAudit second_variation_audit(const VariationSpec& var,
                                            const AssembledOperators& ops, double h,
                                            const AssemblyConfig& cfg,
                                            int quad_resolution = 32);

} // namespace curvatura
