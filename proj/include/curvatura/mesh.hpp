#pragma once

#include <iosfwd>
#include <memory>

#include "curvatura/surface.hpp"

namespace curvatura {

/// Triangulated parametric patch with per-vertex jets and labeled boundary.
struct SurfaceMesh {
    std::shared_ptr<const ParametricPatch> patch;

    std::vector<Eigen::Vector2d> param;
    std::vector<Eigen::Vector4d> position;
    std::vector<SurfaceJet> jets;
    std::vector<std::array<int, 3>> triangles; // counterclockwise in the domain

    struct BoundarySlot {
        int vertex = -1;
        int component = 0;
        double s = 0;       // boundary curve parameter
        bool jet_valid = false;
    };
    std::vector<BoundarySlot> boundary;             // one per boundary vertex
    std::vector<BoundaryJet> boundary_jets;         // parallel to boundary
    std::vector<std::array<int, 2>> boundary_edges; // oriented, domain on the left
    std::vector<int> boundary_edge_component;
    std::vector<int> vertex_to_boundary; // index into boundary, or -1

    int n_boundary_components = 0;
    int euler_characteristic = 0;
    double max_edge_length = 0;
    double total_area = 0;
    std::vector<double> tri_area; // ambient triangle areas

    int n_vertices() const { return static_cast<int>(param.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    bool is_boundary_vertex(int v) const { return vertex_to_boundary[v] >= 0; }
};

/// Conforming triangulation with jets at every vertex. Disk domains use
/// concentric rings (6 j vertices on ring j), annuli a polar grid, rectangles
/// a regular grid. Throws GeometryError on non-immersion at a vertex.
SurfaceMesh mesh_patch(const ParametricPatch& patch, int resolution);
SurfaceMesh mesh_patch(std::shared_ptr<const ParametricPatch> patch, int resolution);

/// ASCII OFF export: header "OFF", counts "V F 0", vertex lines, "3 i j k".
void export_off(const SurfaceMesh& mesh, std::ostream& os);

/// Triangulation of the parameter domain alone (the same construction
/// mesh_patch uses), for quadrature.
std::vector<std::array<Eigen::Vector2d, 3>> param_triangles(const Domain& domain, int resolution);

/// Locates the triangle containing a parameter point (uniform-grid bins).
class TriangleLocator {
public:
    explicit TriangleLocator(const SurfaceMesh& mesh);
    /// Returns triangle index and barycentric coordinates, or -1 if outside.
    int locate(const Eigen::Vector2d& p, Eigen::Vector3d& bary) const;
    /// Linear interpolation of a vertex function; throws if p is outside.
    double interpolate(const Eigen::VectorXd& f, const Eigen::Vector2d& p) const;

private:
    const SurfaceMesh& mesh_;
    double x0_, y0_, cell_;
    int nx_, ny_;
    std::vector<std::vector<int>> bins_;
};

} // namespace curvatura
