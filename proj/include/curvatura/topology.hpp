#pragma once

#include "curvatura/assemble.hpp"

namespace curvatura {

/// Umbilic locus and line-field indices.
struct UmbilicPoint {
    Eigen::Vector2d param;
    double defect = 0;
    double raw_index = 0;  // accumulated doubled-angle rotation / (4 pi)
    double index = 0;      // snapped to a half-integer
    double snap_distance = 0;
};

struct UmbilicReport {
    bool totally_umbilical = false;
    bool degenerate_locus = false;
    std::vector<UmbilicPoint> points;
    int euler_characteristic = 0; // patch metadata when present, else 0
    double sum_of_indices = 0;
};

/// Finds isolated minima of the umbilicity defect below the threshold and
/// computes the winding of the doubled principal-direction angle on a small
/// circuit around each (half-integer indices).
UmbilicReport umbilic_locus(const ParametricPatch& patch, int grid_resolution,
                            double defect_threshold);

/// max |II_Sigma(nu, T)| over boundary vertices: small iff the conormal is a
/// principal direction everywhere on the boundary.
double boundary_principal_direction_check(const SurfaceMesh& mesh);

/// Nodal set of a vertex function: edge-interpolated polylines, sign-connected
/// domains, and the graph vertices where branches meet.
struct NodalGraph {
    bool identically_zero = false;
    double zero_tolerance = 0;

    struct Node {
        bool on_vertex = false; // zero mesh vertex (else edge crossing)
        int vertex = -1;        // mesh vertex id when on_vertex
        int ea = -1, eb = -1;   // crossed edge endpoints
        double tpos = 0;        // crossing parameter along ea -> eb
        Eigen::Vector2d param;
        Eigen::Vector4d position;
        int degree = 0;
        bool on_boundary = false;
    };
    std::vector<Node> nodes;
    struct Segment {
        int n1 = -1, n2 = -1, triangle = -1;
    };
    std::vector<Segment> segments;

    int n_domains = 0;
    std::vector<int> vertex_domain;        // -1 for zero/unassigned vertices
    std::vector<std::vector<int>> domains; // vertex lists per domain
    std::vector<int> domain_sign;

    std::vector<std::vector<int>> polylines;   // node index chains
    std::vector<int> graph_vertices;           // node indices with >= 3 branches
    std::vector<int> interior_endpoints;       // interior nodes of degree 1
};

/// Throws nothing; a function below tolerance everywhere yields
/// identically_zero = true (the rigidity signal).
NodalGraph nodal_graph(const SurfaceMesh& mesh, const Eigen::VectorXd& f, double zero_tol);

/// Balanced two-domain cutoff f~ = f on domain a, alpha f on domain b, 0
/// elsewhere, with alpha chosen so the mass-weighted integral vanishes.
struct BalancedCutoff {
    Eigen::VectorXd f_tilde;
    double alpha = 0;
    double integral_residual = 0; // |1^T M f~| / (1^T M |f~|)
    double index_value = 0;       // I(f~, f~)
};
BalancedCutoff balanced_cutoff(const SurfaceMesh& mesh, const AssembledOperators& ops,
                               const Eigen::VectorXd& f, const NodalGraph& graph, int domain_a,
                               int domain_b);

/// Killing-rotation test functions.
enum class TestFunctionKind { Ball, Slab };

struct RotationAxisSpec {
    enum Mode { PivotParam, Ambient, AutoNearest } mode = AutoNearest;
    Eigen::Vector2d pivot = Eigen::Vector2d::Zero(); // PivotParam
    Eigen::Vector4d axis = Eigen::Vector4d::Zero();  // Ambient

    static RotationAxisSpec auto_nearest() { return {}; }
    static RotationAxisSpec from_pivot(const Eigen::Vector2d& p) {
        RotationAxisSpec s;
        s.mode = PivotParam;
        s.pivot = p;
        return s;
    }
    static RotationAxisSpec from_axis(const Eigen::Vector4d& a) {
        RotationAxisSpec s;
        s.mode = Ambient;
        s.axis = a;
        return s;
    }
};

/// f = <phi ^ a, eta> (ball, c = 0), <phi ^ a ^ e4, eta> (ball, c != 0, ball
/// centered at the model base point), or <phi ^ e3, eta> (slab, c = 0).
Eigen::VectorXd rotation_test_function(const SurfaceMesh& mesh, const SpaceForm& sf,
                                       const RotationAxisSpec& axis, TestFunctionKind kind);

/// Weak-form residuals of the test-function PDE. The interior residual is
/// reported for the index potential 2 H1 (H2 + c) and, for curved ball kinds,
/// also for the variant potential 2 (H1 H2 + c); the boundary residual is the
/// Robin defect by one-sided differences (the analytic field is used at probe
/// points when supplied).
struct PdeResidual {
    double interior = 0;
    double interior_variant = 0;
    double boundary = 0;
};
PdeResidual test_function_pde_residual(const SurfaceMesh& mesh, const AssembledOperators& ops,
                                       const Eigen::VectorXd& f, TestFunctionKind kind,
                                       const std::function<double(double, double)>* analytic_f =
                                           nullptr);

/// Gauss-Bonnet audits with external angles, per region of an optional nodal
/// partition.
struct RegionAudit {
    int id = 0;
    int sign = 0;
    double integral_K = 0;
    double boundary_kg = 0; // smooth dSigma part + nodal-arc turning
    double external_angle_sum = 0;
    std::vector<double> external_angles;
    int chi = 0;
    double residual = 0; // |int K + kg + angles - 2 pi chi|
};

struct GaussBonnetAudit {
    std::vector<RegionAudit> regions;
    double integral_K_total = 0;
    double boundary_kg_smooth = 0; // over dSigma only
    double global_residual = 0;    // Eq-level: 2 pi sum chi - kg - angles vs int K
    double whole_residual = 0;     // single-region |int K + kg - 2 pi chi|
    // Ball-scenario genus report: 2 pi chi > c A + (cn/sn) l implies genus 0.
    double genus_lhs = 0, genus_rhs = 0;
    bool genus_zero_implied = false;
};

GaussBonnetAudit gauss_bonnet_audit(const SurfaceMesh& mesh, const SpaceForm& sf,
                                    const NodalGraph* partition = nullptr,
                                    const BallGeometry* ball = nullptr);

/// Hypothesis check of the ball rigidity theorem: for c > 0 containment in a
/// hemisphere around the ball center, for c < 0 the area/length ratio against
/// -cn_c(R)/(c sn_c(R)); vacuous for c = 0.
struct Theorem2Report {
    double area = 0, boundary_length = 0;
    double ratio = 0, threshold = 0;
    double max_distance = 0, hemisphere_bound = 0;
    bool pass = true;
};
Theorem2Report theorem2_hypothesis_check(const SurfaceMesh& mesh, const SpaceForm& sf, double R);

} // namespace curvatura
