#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "curvatura/spaceform.hpp"

namespace curvatura {

enum class DomainKind { Rectangle, Disk, Annulus };

/// Planar parameter domain of a patch.
struct Domain {
    DomainKind kind = DomainKind::Disk;
    double u0 = 0, u1 = 1, v0 = 0, v1 = 1; // rectangle bounds
    double radius = 1;                     // disk
    double r_inner = 0.5, r_outer = 1;     // annulus

    static Domain rectangle(double u0, double u1, double v0, double v1) {
        Domain d;
        d.kind = DomainKind::Rectangle;
        d.u0 = u0; d.u1 = u1; d.v0 = v0; d.v1 = v1;
        return d;
    }
    static Domain disk(double radius) {
        Domain d;
        d.kind = DomainKind::Disk;
        d.radius = radius;
        return d;
    }
    static Domain annulus(double r_inner, double r_outer) {
        Domain d;
        d.kind = DomainKind::Annulus;
        d.r_inner = r_inner; d.r_outer = r_outer;
        return d;
    }

    bool contains(const Eigen::Vector2d& p, double tol = 1e-12) const;
    double diameter() const;
};

/// Position map evaluated in jet arithmetic. jet_order() reports how many
/// derivative orders of the output are trustworthy: built-in closed-form maps
/// give 3, finite-difference and variation-family maps give 2.
struct PatchMap {
    virtual ~PatchMap() = default;
    virtual int ambient_dim() const = 0;
    virtual int jet_order() const { return 3; }
    virtual void eval(const Jet3& u, const Jet3& v, Jet4v& out) const = 0;
};

/// Fourth-order centered finite differences for maps given only pointwise.
/// Fills first and second derivatives at O(h^4) truncation; third derivatives
/// are filled too but are noisier, hence jet_order() = 2.
class FiniteDifferenceMap : public PatchMap {
public:
    using PositionFn = std::function<Eigen::Vector4d(double, double)>;
    FiniteDifferenceMap(PositionFn fn, int ambient_dim, double step);
    int ambient_dim() const override { return dim_; }
    int jet_order() const override { return 2; }
    void eval(const Jet3& u, const Jet3& v, Jet4v& out) const override;

private:
    PositionFn fn_;
    int dim_;
    double h_;
};

/// Immersed parametric surface patch in M^3(c).
class ParametricPatch {
public:
    ParametricPatch(SpaceForm sf, Domain domain, std::shared_ptr<const PatchMap> map,
                    double orientation_sign = 1.0);

    const SpaceForm& space_form() const { return sf_; }
    const Domain& domain() const { return domain_; }
    double orientation_sign() const { return orientation_sign_; }
    int jet_order() const { return map_->jet_order(); }
    const PatchMap& map() const { return *map_; }

    ParametricPatch with_orientation(double sign) const;

    /// Position jets at a parameter point.
    Jet4v eval(double u, double v) const;
    Eigen::Vector4d position(double u, double v) const;

    /// Verifies the patch invariants (on-model positions, immersion) on a
    /// sample grid; throws GeometryError on failure.
    void validate(int samples_per_side = 9, double model_tol = 1e-10) const;

    /// Euler characteristic of the closed surface this chart covers, when the
    /// patch is an atlas-of-one for a closed surface (ellipsoid charts).
    std::optional<int> closed_surface_euler;

private:
    SpaceForm sf_;
    Domain domain_;
    std::shared_ptr<const PatchMap> map_;
    double orientation_sign_;
};

} // namespace curvatura
