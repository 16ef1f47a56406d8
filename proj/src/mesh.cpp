#include "curvatura/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "curvatura/errors.hpp"

namespace curvatura {

namespace {

struct Builder {
    std::vector<Eigen::Vector2d> param;
    std::vector<std::array<int, 3>> tris;
    // boundary annotations gathered during construction
    std::vector<SurfaceMesh::BoundarySlot> slots;

    int add_vertex(double u, double v) {
        param.emplace_back(u, v);
        return static_cast<int>(param.size()) - 1;
    }
    void add_tri(int a, int b, int c) { tris.push_back({a, b, c}); }
};

// Stitch two concentric rings (inner: na vertices starting at base_a, outer:
// nb at base_b, both counterclockwise, vertex k at angle 2 pi k / n).
void stitch_rings(Builder& b, int base_a, int na, int base_b, int nb) {
    int i = 0, k = 0;
    while (i < na || k < nb) {
        const double a_next = 2 * M_PI * (i + 1) / na;
        const double b_next = 2 * M_PI * (k + 1) / nb;
        if (k < nb && (i == na || b_next <= a_next)) {
            b.add_tri(base_a + (i % na), base_b + (k % nb), base_b + ((k + 1) % nb));
            ++k;
        } else {
            b.add_tri(base_a + (i % na), base_b + (k % nb), base_a + ((i + 1) % na));
            ++i;
        }
    }
}

void build_disk(Builder& b, double R, int n) {
    std::vector<int> ring_base(n + 1), ring_count(n + 1);
    ring_base[0] = b.add_vertex(0, 0);
    ring_count[0] = 1;
    for (int j = 1; j <= n; ++j) {
        const int m = 6 * j;
        const double r = R * j / n;
        ring_base[j] = static_cast<int>(b.param.size());
        ring_count[j] = m;
        for (int k = 0; k < m; ++k) {
            const double th = 2 * M_PI * k / m;
            b.add_vertex(r * std::cos(th), r * std::sin(th));
        }
    }
    for (int k = 0; k < 6; ++k)
        b.add_tri(ring_base[0], ring_base[1] + k, ring_base[1] + (k + 1) % 6);
    for (int j = 1; j < n; ++j)
        stitch_rings(b, ring_base[j], ring_count[j], ring_base[j + 1], ring_count[j + 1]);
    // outer-ring boundary annotations
    const int m = ring_count[n];
    for (int k = 0; k < m; ++k) {
        SurfaceMesh::BoundarySlot s;
        s.vertex = ring_base[n] + k;
        s.component = 0;
        s.s = 2 * M_PI * k / m;
        b.slots.push_back(s);
    }
}

void build_annulus(Builder& b, double ri, double ro, int n) {
    const int m = std::max(8, 6 * n);
    std::vector<int> row_base(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double r = ri + (ro - ri) * j / n;
        row_base[j] = static_cast<int>(b.param.size());
        for (int k = 0; k < m; ++k) {
            const double th = 2 * M_PI * k / m;
            b.add_vertex(r * std::cos(th), r * std::sin(th));
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < m; ++k) {
            const int a = row_base[j] + k, a1 = row_base[j] + (k + 1) % m;
            const int c = row_base[j + 1] + k, c1 = row_base[j + 1] + (k + 1) % m;
            b.add_tri(a, c, c1);
            b.add_tri(a, c1, a1);
        }
    }
    for (int k = 0; k < m; ++k) { // outer circle, component 0
        SurfaceMesh::BoundarySlot s;
        s.vertex = row_base[n] + k;
        s.component = 0;
        s.s = 2 * M_PI * k / m;
        b.slots.push_back(s);
    }
    for (int k = 0; k < m; ++k) { // inner circle, component 1 (clockwise curve)
        SurfaceMesh::BoundarySlot s;
        s.vertex = row_base[0] + k;
        s.component = 1;
        const double th = 2 * M_PI * k / m;
        s.s = std::fmod(2 * M_PI - th, 2 * M_PI);
        b.slots.push_back(s);
    }
}

void build_rectangle(Builder& b, const Domain& dom, int n) {
    const double w = dom.u1 - dom.u0, h = dom.v1 - dom.v0;
    int nu = n, nv = std::max(4, static_cast<int>(std::lround(n * h / w)));
    if (h > w) {
        nv = n;
        nu = std::max(4, static_cast<int>(std::lround(n * w / h)));
    }
    auto vid = [&](int i, int j) { return j * (nu + 1) + i; };
    for (int j = 0; j <= nv; ++j)
        for (int i = 0; i <= nu; ++i)
            b.add_vertex(dom.u0 + w * i / nu, dom.v0 + h * j / nv);
    for (int j = 0; j < nv; ++j) {
        for (int i = 0; i < nu; ++i) {
            b.add_tri(vid(i, j), vid(i + 1, j), vid(i + 1, j + 1));
            b.add_tri(vid(i, j), vid(i + 1, j + 1), vid(i, j + 1));
        }
    }
    // perimeter annotations, counterclockwise from (u0, v0); corners flagged
    auto push = [&](int vertex, double s, bool corner) {
        SurfaceMesh::BoundarySlot slot;
        slot.vertex = vertex;
        slot.component = 0;
        slot.s = s;
        slot.jet_valid = !corner;
        b.slots.push_back(slot);
    };
    for (int i = 0; i < nu; ++i) push(vid(i, 0), w * i / nu, i == 0);
    for (int j = 0; j < nv; ++j) push(vid(nu, j), w + h * j / nv, j == 0);
    for (int i = nu; i > 0; --i) push(vid(i, nv), w + h + w * (nu - i) / nu, i == nu);
    for (int j = nv; j > 0; --j) push(vid(0, j), 2 * w + h + h * (nv - j) / nv, j == nv);
}

} // namespace

SurfaceMesh mesh_patch(std::shared_ptr<const ParametricPatch> patch, int resolution) {
    if (resolution < 4) throw ConfigError("mesh_patch: resolution must be at least 4");
    const Domain& dom = patch->domain();

    Builder b;
    switch (dom.kind) {
        case DomainKind::Disk: build_disk(b, dom.radius, resolution); break;
        case DomainKind::Annulus: build_annulus(b, dom.r_inner, dom.r_outer, resolution); break;
        case DomainKind::Rectangle: build_rectangle(b, dom, resolution); break;
    }

    SurfaceMesh mesh;
    mesh.patch = std::move(patch);
    mesh.param = std::move(b.param);
    mesh.triangles = std::move(b.tris);

    const int nv = mesh.n_vertices();
    mesh.position.resize(nv);
    mesh.jets.resize(nv);
    for (int v = 0; v < nv; ++v) {
        mesh.jets[v] = evaluate_jet(*mesh.patch, mesh.param[v][0], mesh.param[v][1]);
        mesh.position[v] = mesh.jets[v].position;
    }

    // Mark jet_valid on slots whose curve parameter avoids corners; evaluate.
    const SpaceForm& sf = mesh.patch->space_form();
    (void)sf;
    mesh.vertex_to_boundary.assign(nv, -1);
    for (auto& slot : b.slots) {
        if (dom.kind != DomainKind::Rectangle) slot.jet_valid = true;
        mesh.vertex_to_boundary[slot.vertex] = static_cast<int>(mesh.boundary.size());
        mesh.boundary.push_back(slot);
    }
    mesh.boundary_jets.resize(mesh.boundary.size());
    for (size_t i = 0; i < mesh.boundary.size(); ++i) {
        const auto& slot = mesh.boundary[i];
        if (slot.jet_valid) {
            mesh.boundary_jets[i] = evaluate_boundary_jet(*mesh.patch, slot.component, slot.s);
        } else {
            BoundaryJet bj; // corner placeholder: position only
            bj.param = mesh.param[slot.vertex];
            bj.position = mesh.position[slot.vertex];
            bj.component = slot.component;
            bj.s = slot.s;
            mesh.boundary_jets[i] = bj;
        }
    }

    // Boundary edges: edges incident to exactly one triangle, oriented as in
    // their triangle (counterclockwise triangles put the domain on the left).
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = t[e], c = t[(e + 1) % 3];
            edge_count[{std::min(a, c), std::max(a, c)}]++;
        }
    }
    int n_edges = static_cast<int>(edge_count.size());
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = t[e], c = t[(e + 1) % 3];
            if (edge_count[{std::min(a, c), std::max(a, c)}] == 1) {
                mesh.boundary_edges.push_back({a, c});
                const int bi = mesh.vertex_to_boundary[a];
                mesh.boundary_edge_component.push_back(bi >= 0 ? mesh.boundary[bi].component : 0);
            }
        }
    }
    mesh.euler_characteristic = nv - n_edges + mesh.n_triangles();
    int max_comp = -1;
    for (const auto& s : mesh.boundary) max_comp = std::max(max_comp, s.component);
    mesh.n_boundary_components = max_comp + 1;

    // Geometry summaries.
    mesh.tri_area.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Eigen::Vector4d e1 = mesh.position[tri[1]] - mesh.position[tri[0]];
        const Eigen::Vector4d e2 = mesh.position[tri[2]] - mesh.position[tri[0]];
        const double g11 = mesh.patch->space_form().inner(e1, e1);
        const double g12 = mesh.patch->space_form().inner(e1, e2);
        const double g22 = mesh.patch->space_form().inner(e2, e2);
        mesh.tri_area[t] = 0.5 * std::sqrt(std::max(g11 * g22 - g12 * g12, 0.0));
        mesh.total_area += mesh.tri_area[t];
        for (int e = 0; e < 3; ++e) {
            const Eigen::Vector4d d =
                mesh.position[tri[(e + 1) % 3]] - mesh.position[tri[e]];
            mesh.max_edge_length =
                std::max(mesh.max_edge_length,
                         std::sqrt(std::abs(mesh.patch->space_form().inner(d, d))));
        }
        // parameter-plane orientation sanity
        const Eigen::Vector2d p1 = mesh.param[tri[1]] - mesh.param[tri[0]];
        const Eigen::Vector2d p2 = mesh.param[tri[2]] - mesh.param[tri[0]];
        if (p1[0] * p2[1] - p1[1] * p2[0] <= 0)
            throw GeometryError("mesh_patch: inconsistent triangle winding");
    }
    return mesh;
}

SurfaceMesh mesh_patch(const ParametricPatch& patch, int resolution) {
    return mesh_patch(std::make_shared<ParametricPatch>(patch), resolution);
}

std::vector<std::array<Eigen::Vector2d, 3>> param_triangles(const Domain& dom, int resolution) {
    Builder b;
    switch (dom.kind) {
        case DomainKind::Disk: build_disk(b, dom.radius, resolution); break;
        case DomainKind::Annulus: build_annulus(b, dom.r_inner, dom.r_outer, resolution); break;
        case DomainKind::Rectangle: build_rectangle(b, dom, resolution); break;
    }
    std::vector<std::array<Eigen::Vector2d, 3>> tris;
    tris.reserve(b.tris.size());
    for (const auto& t : b.tris)
        tris.push_back({b.param[t[0]], b.param[t[1]], b.param[t[2]]});
    return tris;
}

void export_off(const SurfaceMesh& mesh, std::ostream& os) {
    os << "OFF\n" << mesh.n_vertices() << " " << mesh.n_triangles() << " 0\n";
    const int dim = mesh.patch->space_form().model_dim();
    os.precision(17);
    for (const auto& p : mesh.position) {
        os << p[0] << " " << p[1] << " " << p[2];
        if (dim == 4) os << " " << p[3];
        os << "\n";
    }
    for (const auto& t : mesh.triangles) os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

TriangleLocator::TriangleLocator(const SurfaceMesh& mesh) : mesh_(mesh) {
    double x1 = 1e300, y1 = 1e300, x2 = -1e300, y2 = -1e300;
    for (const auto& p : mesh.param) {
        x1 = std::min(x1, p[0]); y1 = std::min(y1, p[1]);
        x2 = std::max(x2, p[0]); y2 = std::max(y2, p[1]);
    }
    const int n = std::max(8, static_cast<int>(std::sqrt(double(mesh.n_triangles()))));
    nx_ = ny_ = n;
    x0_ = x1; y0_ = y1;
    cell_ = std::max((x2 - x1) / nx_, (y2 - y1) / ny_) + 1e-300;
    bins_.assign(static_cast<size_t>(nx_) * ny_, {});
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        double tx1 = 1e300, ty1 = 1e300, tx2 = -1e300, ty2 = -1e300;
        for (int k = 0; k < 3; ++k) {
            const auto& p = mesh.param[tri[k]];
            tx1 = std::min(tx1, p[0]); ty1 = std::min(ty1, p[1]);
            tx2 = std::max(tx2, p[0]); ty2 = std::max(ty2, p[1]);
        }
        const int i1 = std::clamp(int((tx1 - x0_) / cell_), 0, nx_ - 1);
        const int i2 = std::clamp(int((tx2 - x0_) / cell_), 0, nx_ - 1);
        const int j1 = std::clamp(int((ty1 - y0_) / cell_), 0, ny_ - 1);
        const int j2 = std::clamp(int((ty2 - y0_) / cell_), 0, ny_ - 1);
        for (int j = j1; j <= j2; ++j)
            for (int i = i1; i <= i2; ++i) bins_[j * nx_ + i].push_back(t);
    }
}

int TriangleLocator::locate(const Eigen::Vector2d& p, Eigen::Vector3d& bary) const {
    const int i = std::clamp(int((p[0] - x0_) / cell_), 0, nx_ - 1);
    const int j = std::clamp(int((p[1] - y0_) / cell_), 0, ny_ - 1);
    int best = -1;
    double best_neg = -1e300;
    for (int t : bins_[j * nx_ + i]) {
        const auto& tri = mesh_.triangles[t];
        const Eigen::Vector2d a = mesh_.param[tri[0]], b = mesh_.param[tri[1]],
                              c = mesh_.param[tri[2]];
        const double det = (b - a)[0] * (c - a)[1] - (b - a)[1] * (c - a)[0];
        if (det == 0) continue;
        const double l2 = ((p - a)[0] * (c - a)[1] - (p - a)[1] * (c - a)[0]) / det;
        const double l3 = ((b - a)[0] * (p - a)[1] - (b - a)[1] * (p - a)[0]) / det;
        const double l1 = 1 - l2 - l3;
        const double worst = std::min({l1, l2, l3});
        if (worst >= -1e-12) {
            bary = Eigen::Vector3d(l1, l2, l3);
            return t;
        }
        if (worst > best_neg) {
            best_neg = worst;
            best = t;
            bary = Eigen::Vector3d(l1, l2, l3);
        }
    }
    // Accept slightly-outside queries (curved cell boundaries).
    if (best >= 0 && best_neg > -1e-6) return best;
    return -1;
}

double TriangleLocator::interpolate(const Eigen::VectorXd& f, const Eigen::Vector2d& p) const {
    Eigen::Vector3d bary;
    const int t = locate(p, bary);
    if (t < 0) throw GeometryError("TriangleLocator: point outside the mesh");
    const auto& tri = mesh_.triangles[t];
    return bary[0] * f[tri[0]] + bary[1] * f[tri[1]] + bary[2] * f[tri[2]];
}

} // namespace curvatura
