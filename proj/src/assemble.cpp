#include "curvatura/assemble.hpp"

#include <cmath>
#include <ostream>

#include "curvatura/errors.hpp"

namespace curvatura {

double robin_coefficient(const AssemblyConfig& cfg, const BoundaryJet& bjet) {
    if (!(cfg.theta > 0) || !(cfg.theta < M_PI))
        throw ConfigError("robin_coefficient: contact angle must lie in (0, pi)");
    double support_II = 0;
    switch (cfg.support) {
        case SupportKind::Ball:
            if (!cfg.ball) throw ConfigError("robin_coefficient: ball support geometry missing");
            support_II = cfg.ball->boundary_second_fundamental;
            break;
        case SupportKind::Slab:
            support_II = 0; // planes are totally geodesic
            break;
        case SupportKind::None:
            throw ConfigError("robin_coefficient: support geometry required for alpha_theta");
    }
    const double csc = 1.0 / std::sin(cfg.theta);
    const double cot = std::cos(cfg.theta) / std::sin(cfg.theta);
    const double II_nn = cfg.laplacian_audit ? 0.0 : bjet.II_nn;
    return csc * support_II - cot * II_nn + cfg.alpha_shift;
}

AssembledOperators assemble(const SurfaceMesh& mesh, const SpaceForm& sf,
                            const AssemblyConfig& cfg) {
    const int n = mesh.n_vertices();
    const double c = sf.curvature();

    AssembledOperators ops;
    ops.mesh = &mesh;
    ops.h_max = mesh.max_edge_length;
    ops.area = mesh.total_area;

    // Per-vertex densities in the parametric frame.
    std::vector<Eigen::Matrix2d> W(n); // P1 g^{-1} sqrt(det g), stiffness conductivity
    std::vector<double> rho(n);        // sqrt(det g)
    std::vector<double> qrho(n);       // q_r sqrt(det g)
    double min_p1 = 1e300;
    for (int v = 0; v < n; ++v) {
        const SurfaceJet& j = mesh.jets[v];
        const Eigen::Matrix2d ginv = j.metric.inverse();
        Eigen::Matrix2d P1 = cfg.laplacian_audit
                                 ? Eigen::Matrix2d::Identity()
                                 : Eigen::Matrix2d(j.newton_coord());
        const double q = cfg.laplacian_audit ? cfg.q_override : 2 * j.H1 * (j.H2 + c);
        rho[v] = j.sqrt_det_g;
        W[v] = P1 * ginv * j.sqrt_det_g;
        W[v] = 0.5 * (W[v] + W[v].transpose()).eval();
        qrho[v] = q * j.sqrt_det_g;
        ops.q_scale = std::max(ops.q_scale, std::abs(q));
        min_p1 = std::min(min_p1, 2 * j.H1 - j.kappa1);
    }
    ops.min_p1_eigenvalue = cfg.laplacian_audit ? 1.0 : min_p1;
    ops.p1_positive_definite = ops.min_p1_eigenvalue > 0;

    std::vector<Eigen::Triplet<double>> tK, tM, tQ, tB;
    tK.reserve(9 * mesh.n_triangles());
    tM.reserve(9 * mesh.n_triangles());
    tQ.reserve(9 * mesh.n_triangles());

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Eigen::Vector2d p0 = mesh.param[tri[0]], p1 = mesh.param[tri[1]],
                              p2 = mesh.param[tri[2]];
        const double det = (p1 - p0)[0] * (p2 - p0)[1] - (p1 - p0)[1] * (p2 - p0)[0];
        const double area_param = 0.5 * det;
        // Constant gradients of the hat functions in parameter coordinates.
        Eigen::Matrix<double, 2, 3> grad;
        grad.col(0) = Eigen::Vector2d(p1[1] - p2[1], p2[0] - p1[0]) / det;
        grad.col(1) = Eigen::Vector2d(p2[1] - p0[1], p0[0] - p2[0]) / det;
        grad.col(2) = Eigen::Vector2d(p0[1] - p1[1], p1[0] - p0[0]) / det;

        const Eigen::Matrix2d Wbar = (W[tri[0]] + W[tri[1]] + W[tri[2]]) / 3.0;

        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                const double k = grad.col(a).dot(Wbar * grad.col(b)) * area_param;
                tK.emplace_back(tri[a], tri[b], k);
                // Exact integrals of products of three linears:
                // int phi_a phi_b rho with rho linearly interpolated.
                double m = 0, q = 0;
                for (int cidx = 0; cidx < 3; ++cidx) {
                    // int_T phi_a phi_b phi_c = 2 area (1! each distinct) ... use
                    // the multinomial formula 2A a!b!c!/(a+b+c+2)!.
                    int occ[3] = {0, 0, 0};
                    occ[a]++; occ[b]++; occ[cidx]++;
                    double fact = 2.0;
                    for (int i = 0; i < 3; ++i)
                        for (int f = 2; f <= occ[i]; ++f) fact *= f;
                    fact /= 120.0; // (1+1+1+2)! = 120
                    const double integral = std::abs(area_param) * fact;
                    m += rho[tri[cidx]] * integral;
                    q += qrho[tri[cidx]] * integral;
                }
                tM.emplace_back(tri[a], tri[b], m);
                tQ.emplace_back(tri[a], tri[b], q);
            }
        }
    }

    // Robin boundary form.
    ops.alpha.assign(mesh.boundary.size(), 0.0);
    const bool with_boundary = cfg.support != SupportKind::None;
    if (with_boundary) {
        for (size_t i = 0; i < mesh.boundary.size(); ++i) {
            if (!mesh.boundary[i].jet_valid)
                throw GeometryError("assemble: boundary jets unavailable (domain corner)");
            ops.alpha[i] = robin_coefficient(cfg, mesh.boundary_jets[i]);
        }
        for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
            const int va = mesh.boundary_edges[e][0], vb = mesh.boundary_edges[e][1];
            const int ia = mesh.vertex_to_boundary[va], ib = mesh.vertex_to_boundary[vb];
            const BoundaryJet &ja = mesh.boundary_jets[ia], &jb = mesh.boundary_jets[ib];
            const double wa = (cfg.laplacian_audit ? 1.0 : ja.P1nu_norm) * ops.alpha[ia];
            const double wb = (cfg.laplacian_audit ? 1.0 : jb.P1nu_norm) * ops.alpha[ib];
            const Eigen::Vector4d d = mesh.position[vb] - mesh.position[va];
            const double len = std::sqrt(std::abs(sf.inner(d, d)));
            // 2-point Gauss on the edge; basis (1-s, s), weight w(s) linear.
            const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
            double Baa = 0, Bab = 0, Bbb = 0;
            for (double s : gp) {
                const double w = wa * (1 - s) + wb * s;
                const double half = 0.5 * len; // Gauss weight 1/2 each, scaled by length
                Baa += half * w * (1 - s) * (1 - s);
                Bab += half * w * (1 - s) * s;
                Bbb += half * w * s * s;
            }
            tB.emplace_back(va, va, Baa);
            tB.emplace_back(va, vb, Bab);
            tB.emplace_back(vb, va, Bab);
            tB.emplace_back(vb, vb, Bbb);
        }
    }

    ops.K.resize(n, n); ops.M.resize(n, n); ops.Q.resize(n, n); ops.B.resize(n, n);
    ops.K.setFromTriplets(tK.begin(), tK.end());
    ops.M.setFromTriplets(tM.begin(), tM.end());
    ops.Q.setFromTriplets(tQ.begin(), tQ.end());
    ops.B.setFromTriplets(tB.begin(), tB.end());
    return ops;
}

Eigen::SparseMatrix<double> assemble_density_form(const SurfaceMesh& mesh,
                                                  const std::vector<double>& density) {
    const int n = mesh.n_vertices();
    if (static_cast<int>(density.size()) != n)
        throw ConfigError("assemble_density_form: density size mismatch");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Eigen::Vector2d p0 = mesh.param[tri[0]], p1 = mesh.param[tri[1]],
                              p2 = mesh.param[tri[2]];
        const double area_param =
            0.5 * ((p1 - p0)[0] * (p2 - p0)[1] - (p1 - p0)[1] * (p2 - p0)[0]);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                double q = 0;
                for (int cidx = 0; cidx < 3; ++cidx) {
                    int occ[3] = {0, 0, 0};
                    occ[a]++; occ[b]++; occ[cidx]++;
                    double fact = 2.0;
                    for (int i = 0; i < 3; ++i)
                        for (int f = 2; f <= occ[i]; ++f) fact *= f;
                    fact /= 120.0;
                    q += density[tri[cidx]] * mesh.jets[tri[cidx]].sqrt_det_g *
                         std::abs(area_param) * fact;
                }
                trip.emplace_back(tri[a], tri[b], q);
            }
        }
    }
    Eigen::SparseMatrix<double> Q(n, n);
    Q.setFromTriplets(trip.begin(), trip.end());
    return Q;
}

double index_form(const AssembledOperators& ops, const Eigen::VectorXd& f1,
                  const Eigen::VectorXd& f2) {
    if (f1.size() != ops.K.rows() || f2.size() != ops.K.rows())
        throw ConfigError("index_form: dimension mismatch");
    return f1.dot(ops.K * f2) - f1.dot(ops.Q * f2) + f1.dot(ops.B * f2);
}

Eigen::VectorXd lumped_mass(const AssembledOperators& ops) {
    return ops.M * Eigen::VectorXd::Ones(ops.M.rows());
}

void export_coordinate_format(const Eigen::SparseMatrix<double>& A, std::ostream& os) {
    os.precision(17);
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
            os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

} // namespace curvatura
