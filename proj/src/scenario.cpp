#include "curvatura/scenario.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "curvatura/catalog.hpp"
#include "curvatura/errors.hpp"
#include "curvatura/profile.hpp"
#include "curvatura/spectrum.hpp"
#include "curvatura/topology.hpp"
#include "curvatura/variations.hpp"
#include "json.hpp"

namespace curvatura {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError("unknown field '" + it.key() + "' in " + where);
    }
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key))
        throw ConfigError("missing field '" + key + "' in " + where);
    if (!obj[key].is_number())
        throw ConfigError("field '" + key + "' in " + where + " must be a number");
    return obj[key].get<double>();
}

struct BuiltGeometry {
    std::shared_ptr<const ParametricPatch> patch;
    SupportKind support = SupportKind::None;
    double ball_radius = 0;
    std::vector<double> slab_planes;
    double theta = M_PI / 2;
    std::string kind;
    bool is_capillary = false; // boundary rests on a support body
};

BuiltGeometry build_catalog_patch(const json& g, double c);

BuiltGeometry build_geometry(const json& g, double c) {
    if (!g.contains("kind")) throw ConfigError("missing field 'kind' in geometry");
    const std::string kind = g["kind"].get<std::string>();
    BuiltGeometry out;
    out.kind = kind;
    const SpaceForm sf = c == 0 ? SpaceForm::euclidean() : SpaceForm::with_curvature(c);

    if (kind == "cap-in-ball") {
        reject_unknown(g, {"kind", "R", "r"}, "geometry");
        const double R = require_number(g, "R", "geometry");
        const double r = require_number(g, "r", "geometry");
        CapInBall cap = make_cap_in_ball(sf, R, r);
        out.patch = std::make_shared<ParametricPatch>(cap.patch);
        out.support = SupportKind::Ball;
        out.ball_radius = R;
        out.is_capillary = true;
    } else if (kind == "rotational-slab") {
        reject_unknown(g, {"kind", "H2", "seed"}, "geometry");
        if (c != 0) throw ConfigError("rotational-slab requires c = 0");
        const double H2 = require_number(g, "H2", "geometry");
        const double seed = g.contains("seed") ? require_number(g, "seed", "geometry") : 0.8;
        const RotationalProfile prof = rotational_h2_profile(sf, H2, seed);
        if (!prof.shooting_converged)
            throw SolverError("rotational-slab shooting failed: " + prof.outcome);
        const double margin = 0.05 * (prof.s_max - prof.s_min);
        out.patch = std::make_shared<ParametricPatch>(
            make_rotational_patch(prof, prof.s_min + margin, prof.s_max - margin));
        out.support = SupportKind::Slab;
        out.slab_planes = prof.vertical_tangent_heights;
    } else if (kind == "ellipsoid") {
        reject_unknown(g, {"kind", "a", "b", "c"}, "geometry");
        if (c != 0) throw ConfigError("ellipsoid geometry requires c = 0");
        const double a = require_number(g, "a", "geometry");
        const double b = require_number(g, "b", "geometry");
        const double cc = require_number(g, "c", "geometry");
        out.patch = std::make_shared<ParametricPatch>(make_ellipsoid(
            a, b, cc, Domain::rectangle(-M_PI / 2, 3 * M_PI / 2, -1.25, 1.25)));
    } else if (kind == "custom-patch") {
        reject_unknown(g, {"kind", "file"}, "geometry");
        if (!g.contains("file")) throw ConfigError("missing field 'file' in geometry");
        std::ifstream in(g["file"].get<std::string>());
        if (!in) throw ConfigError("cannot open patch file " + g["file"].get<std::string>());
        json pj;
        try {
            in >> pj;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("patch file parse error: ") + e.what());
        }
        return build_catalog_patch(pj, c);
    } else {
        throw ConfigError("unknown geometry kind '" + kind + "'");
    }
    return out;
}

BuiltGeometry build_catalog_patch(const json& g, double c) {
    if (!g.contains("catalog")) throw ConfigError("missing field 'catalog' in patch file");
    const std::string name = g["catalog"].get<std::string>();
    const SpaceForm sf = c == 0 ? SpaceForm::euclidean() : SpaceForm::with_curvature(c);
    BuiltGeometry out;
    out.kind = "custom:" + name;

    auto euclidean_only = [&] {
        if (c != 0) throw ConfigError("catalog patch '" + name + "' requires c = 0");
    };
    if (name == "plane-disk") {
        reject_unknown(g, {"catalog", "radius"}, "patch file");
        euclidean_only();
        out.patch = std::make_shared<ParametricPatch>(
            make_plane_disk(require_number(g, "radius", "patch file")));
    } else if (name == "sphere-cap") {
        reject_unknown(g, {"catalog", "r", "alpha_max"}, "patch file");
        euclidean_only();
        out.patch = std::make_shared<ParametricPatch>(
            make_sphere_polar_cap(require_number(g, "r", "patch file"),
                                  Eigen::Vector3d::Zero(),
                                  require_number(g, "alpha_max", "patch file")));
    } else if (name == "cap-on-plane") {
        reject_unknown(g, {"catalog", "r", "h"}, "patch file");
        euclidean_only();
        out.patch = std::make_shared<ParametricPatch>(make_cap_on_plane(
            require_number(g, "r", "patch file"), require_number(g, "h", "patch file")));
        out.support = SupportKind::Slab;
        out.slab_planes = {0.0};
        out.is_capillary = true;
    } else if (name == "capillary-cap-ball") {
        reject_unknown(g, {"catalog", "R", "r", "d"}, "patch file");
        euclidean_only();
        const double R = require_number(g, "R", "patch file");
        CapInBall cap = make_cap_in_ball_at_distance(sf, R,
                                                     require_number(g, "r", "patch file"),
                                                     require_number(g, "d", "patch file"));
        out.patch = std::make_shared<ParametricPatch>(cap.patch);
        out.support = SupportKind::Ball;
        out.ball_radius = R;
        out.is_capillary = true;
    } else if (name == "wavy-patch") {
        reject_unknown(g, {"catalog", "r", "scale", "amplitude"}, "patch file");
        euclidean_only();
        out.patch = std::make_shared<ParametricPatch>(make_wavy_patch(
            require_number(g, "r", "patch file"), require_number(g, "scale", "patch file"),
            require_number(g, "amplitude", "patch file")));
    } else if (name == "monkey-saddle") {
        reject_unknown(g, {"catalog", "scale", "radius"}, "patch file");
        euclidean_only();
        out.patch = std::make_shared<ParametricPatch>(make_monkey_saddle(
            require_number(g, "scale", "patch file"), require_number(g, "radius", "patch file")));
    } else if (name == "sphere-band") {
        reject_unknown(g, {"catalog", "r", "alpha0", "alpha1"}, "patch file");
        euclidean_only();
        out.patch = std::make_shared<ParametricPatch>(make_sphere_band(
            require_number(g, "r", "patch file"), require_number(g, "alpha0", "patch file"),
            require_number(g, "alpha1", "patch file")));
    } else if (name == "rotational-h2") {
        reject_unknown(g, {"catalog", "H2", "rho0"}, "patch file");
        euclidean_only();
        const RotationalProfile prof = rotational_h2_profile(
            sf, require_number(g, "H2", "patch file"), require_number(g, "rho0", "patch file"));
        const double margin = 0.1 * (prof.s_max - prof.s_min);
        out.patch = std::make_shared<ParametricPatch>(
            make_rotational_patch(prof, prof.s_min + margin, prof.s_max - margin));
    } else {
        throw ConfigError("unknown catalog patch '" + name + "'");
    }
    return out;
}

// Measured contact angle at a boundary point, from the frame relation.
double measure_contact_angle(const BuiltGeometry& geo, const SurfaceMesh& mesh) {
    const SpaceForm& sf = mesh.patch->space_form();
    for (size_t i = 0; i < mesh.boundary.size(); ++i) {
        if (!mesh.boundary[i].jet_valid) continue;
        const BoundaryJet& bj = mesh.boundary_jets[i];
        Eigen::Vector4d eta_bar;
        if (geo.support == SupportKind::Ball) {
            if (sf.curvature() == 0) {
                eta_bar = Eigen::Vector4d::Zero();
                eta_bar.head<3>() = bj.position.head<3>().normalized();
            } else {
                const double c = sf.curvature(), R = geo.ball_radius;
                eta_bar = (cn(c, R) * bj.position - sf.base_point()) / sn(c, R);
            }
        } else if (geo.support == SupportKind::Slab) {
            eta_bar = Eigen::Vector4d::Zero();
            eta_bar[2] = -1; // lower plane outward normal
        } else {
            return M_PI / 2;
        }
        const double sin_t = sf.inner(eta_bar, bj.conormal);
        const double cos_t = sf.inner(eta_bar, bj.normal);
        return std::atan2(sin_t, cos_t);
    }
    return M_PI / 2;
}

struct CheckList {
    json entries = json::array();
    bool all_pass = true;
    void add(const std::string& name, double value, double threshold, bool less_than = true) {
        const bool pass = less_than ? (value < threshold) : (value >= threshold);
        entries.push_back({{"name", name},
                           {"value", value},
                           {"threshold", threshold},
                           {"pass", pass}});
        all_pass = all_pass && pass;
    }
    void add_flag(const std::string& name, bool pass) {
        entries.push_back({{"name", name}, {"pass", pass}});
        all_pass = all_pass && pass;
    }
};

json vec_to_json(const std::vector<double>& v) { return json(v); }

} // namespace

std::string describe_scenarios() {
    return
        "geometry kinds:\n"
        "  cap-in-ball{R, r}        free-boundary umbilical cap in the geodesic ball B_R\n"
        "  rotational-slab{H2, seed} rotational H2 profile with slab shooting (status 4 on\n"
        "                            shooting failure)\n"
        "  ellipsoid{a, b, c}       triaxial ellipsoid chart (umbilic audits)\n"
        "  custom-patch{file}       catalog patch from a JSON file; catalog names:\n"
        "    plane-disk{radius} | sphere-cap{r, alpha_max} | cap-on-plane{r, h} |\n"
        "    capillary-cap-ball{R, r, d} | wavy-patch{r, scale, amplitude} |\n"
        "    monkey-saddle{scale, radius} | sphere-band{r, alpha0, alpha1} |\n"
        "    rotational-h2{H2, rho0}\n"
        "analyses: jets | assemble | spectrum | stability | variation-audit | topology |\n"
        "          theorem-check\n";
}

namespace {

int run_scenario_impl(const std::string& config_path, const RunOptions& options) {
    json cfg;
    {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config file " + config_path);
        try {
            in >> cfg;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
    }
    reject_unknown(cfg,
                   {"name", "c", "geometry", "resolution", "analyses", "tolerances",
                    "output_dir"},
                   "scenario");
    if (!cfg.contains("name")) throw ConfigError("missing field 'name' in scenario");
    if (!cfg.contains("geometry")) throw ConfigError("missing field 'geometry' in scenario");
    if (!cfg.contains("analyses") || !cfg["analyses"].is_array() || cfg["analyses"].empty())
        throw ConfigError("field 'analyses' must be a nonempty array");
    const double c = cfg.contains("c") ? require_number(cfg, "c", "scenario") : 0.0;
    const int resolution =
        cfg.contains("resolution") ? static_cast<int>(require_number(cfg, "resolution", "scenario"))
                                   : 32;
    json tol = cfg.contains("tolerances") ? cfg["tolerances"] : json::object();
    reject_unknown(tol,
                   {"newton", "gauss", "symmetry", "eigen_k", "stability", "volume_rate",
                    "second_variation", "boundary_principal", "zero_function"},
                   "tolerances");

    const SpaceForm sf = c == 0 ? SpaceForm::euclidean() : SpaceForm::with_curvature(c);
    BuiltGeometry geo = build_geometry(cfg["geometry"], c);

    std::string out_dir = options.out_dir;
    if (out_dir.empty() && cfg.contains("output_dir"))
        out_dir = cfg["output_dir"].get<std::string>();
    if (out_dir.empty()) out_dir = ".";
    std::filesystem::create_directories(out_dir);

    json report;
    report["schema_version"] = "1.0.0";
    report["scenario"] = cfg;
    if (!options.no_timestamp) {
        report["timestamp"] = static_cast<long long>(
            std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count());
    }

    SurfaceMesh mesh = mesh_patch(geo.patch, resolution);
    report["mesh"] = {{"vertices", mesh.n_vertices()},
                      {"triangles", mesh.n_triangles()},
                      {"euler_characteristic", mesh.euler_characteristic},
                      {"boundary_components", mesh.n_boundary_components},
                      {"max_edge_length", mesh.max_edge_length},
                      {"area", mesh.total_area}};

    CheckList checks;
    AssemblyConfig acfg;
    acfg.support = geo.support;
    if (geo.support == SupportKind::Ball) acfg.ball = ball_geometry(sf, geo.ball_radius);
    if (geo.is_capillary) acfg.theta = measure_contact_angle(geo, mesh);
    std::optional<AssembledOperators> ops;
    auto ensure_ops = [&]() -> AssembledOperators& {
        if (!ops) ops = assemble(mesh, sf, acfg);
        return *ops;
    };

    for (const auto& aj : cfg["analyses"]) {
        const std::string a = aj.get<std::string>();
        if (a == "jets") {
            double newton = 0, gauss = 0;
            for (const auto& j : mesh.jets) {
                const auto r = verify_newton_identities(j);
                newton = std::max({newton, r[0], r[1], r[2]});
                if (mesh.patch->jet_order() >= 3)
                    gauss = std::max(gauss, std::abs(j.gauss_intrinsic - j.H2 - c));
            }
            report["jets"] = {{"max_newton_residual", newton},
                              {"max_gauss_relation_residual", gauss}};
            checks.add("newton_identities", newton, tol.value("newton", 1e-9));
            if (mesh.patch->jet_order() >= 3)
                checks.add("gauss_relation", gauss, tol.value("gauss", 1e-8));
        } else if (a == "assemble") {
            AssembledOperators& o = ensure_ops();
            const auto sym = [](const Eigen::SparseMatrix<double>& A) {
                Eigen::SparseMatrix<double> D = Eigen::SparseMatrix<double>(A.transpose()) - A;
                double num = 0, den = 0;
                for (int k = 0; k < D.outerSize(); ++k)
                    for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it)
                        num = std::max(num, std::abs(it.value()));
                for (int k = 0; k < A.outerSize(); ++k)
                    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
                        den = std::max(den, std::abs(it.value()));
                return den > 0 ? num / den : 0.0;
            };
            const Eigen::VectorXd K1 = o.K * Eigen::VectorXd::Ones(mesh.n_vertices());
            report["assemble"] = {{"K_symmetry", sym(o.K)},
                                  {"B_symmetry", sym(o.B)},
                                  {"K_annihilates_constants", K1.lpNorm<Eigen::Infinity>()},
                                  {"p1_positive_definite", o.p1_positive_definite},
                                  {"min_p1_eigenvalue", o.min_p1_eigenvalue},
                                  {"contact_angle", acfg.theta}};
            checks.add("operator_symmetry", std::max(sym(o.K), sym(o.B)),
                       tol.value("symmetry", 1e-12));
            checks.add("stiffness_kernel_constants", K1.lpNorm<Eigen::Infinity>(),
                       1e-10 * (1 + o.q_scale));
        } else if (a == "spectrum") {
            AssembledOperators& o = ensure_ops();
            const int k = static_cast<int>(tol.value("eigen_k", 6.0));
            Spectrum full = solve_spectrum(o, k, false);
            Spectrum constrained = solve_spectrum(o, k, true);
            report["spectrum"] = {{"full", vec_to_json(full.eigenvalues)},
                                  {"constrained", vec_to_json(constrained.eigenvalues)},
                                  {"full_residuals", vec_to_json(full.residuals)},
                                  {"constrained_residuals", vec_to_json(constrained.residuals)}};
            std::ofstream csv(out_dir + "/spectrum.csv");
            constrained.export_csv(csv);
            double worst = 0;
            for (double r : full.residuals) worst = std::max(worst, r);
            for (double r : constrained.residuals) worst = std::max(worst, r);
            checks.add("eigen_residuals", worst, 1e-6);
        } else if (a == "stability") {
            if (geo.support == SupportKind::None)
                throw ConfigError("stability analysis requires a supported geometry "
                                  "(cap-in-ball, cap-on-plane, rotational-slab)");
            AssembledOperators& o = ensure_ops();
            const StabilityVerdict v = stability_verdict(o);
            report["stability"] = {{"lambda_min_constrained", v.lambda_min_constrained},
                                   {"lambda_min_full", v.lambda_min_full},
                                   {"stable", v.stable},
                                   {"strongly_stable", v.strongly_stable},
                                   {"tolerance", v.tolerance}};
            if (tol.contains("stability")) {
                const bool expect = tol["stability"].get<bool>();
                checks.add_flag("stability_matches_expectation", v.stable == expect);
            }
        } else if (a == "variation-audit") {
            VariationSpec var;
            var.base = geo.patch;
            var.support_kind = geo.support;
            var.ball_radius = geo.ball_radius;
            var.slab_planes = geo.slab_planes;
            double worst_volume = 0;
            std::vector<json> entries;
            const std::vector<std::function<Jet3(const Jet3&, const Jet3&)>> fields = {
                [](const Jet3&, const Jet3&) { return Jet3(1.0); },
                [](const Jet3& u, const Jet3&) { return u; },
                [](const Jet3&, const Jet3& v) { return v; },
                [](const Jet3& u, const Jet3& v) { return u * u - v * v; },
                [](const Jet3& u, const Jet3& v) { return sin(2.0 * u) + cos(v); }};
            const double h = 1e-4 * geo.patch->domain().diameter();
            for (size_t fi = 0; fi < fields.size(); ++fi) {
                var.support = ScalarField{fields[fi]};
                const double t0 = 1e-3;
                const double Vp = enclosed_volume(var, t0), Vm = enclosed_volume(var, -t0);
                const double rate = (Vp - Vm) / (2 * t0);
                // int f dmu via the mass matrix.
                AssembledOperators& o = ensure_ops();
                Eigen::VectorXd fv(mesh.n_vertices());
                for (int vtx = 0; vtx < mesh.n_vertices(); ++vtx)
                    fv[vtx] = var.support.value(mesh.param[vtx][0], mesh.param[vtx][1]);
                const double integral = Eigen::VectorXd::Ones(mesh.n_vertices()).dot(o.M * fv);
                const double rel = std::abs(rate - integral) /
                                   std::max({std::abs(integral), std::abs(rate), 1e-12});
                worst_volume = std::max(worst_volume, rel);
                entries.push_back({{"field", fi}, {"volume_rate", rate}, {"integral", integral},
                                   {"rel_error", rel}});
                (void)h;
            }
            report["variation_audit"] = {{"volume_rate", entries}};
            checks.add("volume_rate_identity", worst_volume, tol.value("volume_rate", 1e-4));
        } else if (a == "topology") {
            json tp;
            if (geo.is_capillary) {
                const double bp = boundary_principal_direction_check(mesh);
                tp["boundary_principal_max_II_nt"] = bp;
                checks.add("boundary_principal_direction", bp,
                           tol.value("boundary_principal", 1e-8));
            }
            if (geo.kind == "ellipsoid" || geo.kind == "custom:monkey-saddle") {
                const UmbilicReport ur = umbilic_locus(*geo.patch, 160, 0.05);
                json pts = json::array();
                for (const auto& p : ur.points)
                    pts.push_back({{"u", p.param[0]},
                                   {"v", p.param[1]},
                                   {"index", p.index},
                                   {"raw_index", p.raw_index},
                                   {"snap_distance", p.snap_distance}});
                tp["umbilics"] = {{"points", pts},
                                  {"sum_of_indices", ur.sum_of_indices},
                                  {"totally_umbilical", ur.totally_umbilical},
                                  {"degenerate_locus", ur.degenerate_locus}};
            }
            if (geo.support != SupportKind::None) {
                AssembledOperators& o = ensure_ops();
                const TestFunctionKind kind = geo.support == SupportKind::Ball
                                                  ? TestFunctionKind::Ball
                                                  : TestFunctionKind::Slab;
                const Eigen::VectorXd f0 =
                    rotation_test_function(mesh, sf, RotationAxisSpec::auto_nearest(), kind);
                tp["rotation_function_sup"] = f0.lpNorm<Eigen::Infinity>();
                // Tilted-axis variant: Jacobi field with a nontrivial nodal set.
                Eigen::Vector4d tilted(std::sin(0.4), 0, std::cos(0.4), 0);
                const Eigen::VectorXd f1 = rotation_test_function(
                    mesh, sf, RotationAxisSpec::from_axis(tilted), kind);
                const double fscale = f1.lpNorm<Eigen::Infinity>();
                const NodalGraph gr = nodal_graph(mesh, f1, 1e-6 * std::max(fscale, 1e-30));
                tp["tilted_nodal_domains"] = gr.n_domains;
                const PdeResidual pr = test_function_pde_residual(mesh, o, f1,
                                                                  kind);
                tp["tilted_pde_interior"] = pr.interior;
                tp["tilted_pde_interior_variant"] = pr.interior_variant;
                tp["tilted_pde_boundary"] = pr.boundary;
                if (gr.n_domains >= 2) {
                    const BalancedCutoff bc = balanced_cutoff(mesh, o, f1, gr, 0, 1);
                    tp["balanced_cutoff"] = {{"alpha", bc.alpha},
                                             {"integral_residual", bc.integral_residual},
                                             {"index_value", bc.index_value}};
                }
                const GaussBonnetAudit gb = gauss_bonnet_audit(
                    mesh, sf, gr.n_domains >= 2 ? &gr : nullptr,
                    acfg.ball ? &*acfg.ball : nullptr);
                json regions = json::array();
                for (const auto& r : gb.regions)
                    regions.push_back({{"chi", r.chi},
                                       {"int_K", r.integral_K},
                                       {"kg", r.boundary_kg},
                                       {"external_angles", vec_to_json(r.external_angles)},
                                       {"residual", r.residual}});
                tp["gauss_bonnet"] = {{"whole_residual", gb.whole_residual},
                                      {"global_residual", gb.global_residual},
                                      {"regions", regions}};
                checks.add("gauss_bonnet_whole", gb.whole_residual, 1e-2);
            } else {
                const GaussBonnetAudit gb = gauss_bonnet_audit(mesh, sf);
                tp["gauss_bonnet"] = {{"whole_residual", gb.whole_residual}};
            }
            report["topology"] = tp;
        } else if (a == "theorem-check") {
            if (geo.support != SupportKind::Ball)
                throw ConfigError("theorem-check requires a ball scenario");
            const Theorem2Report t2 = theorem2_hypothesis_check(mesh, sf, geo.ball_radius);
            report["theorem_check"] = {{"area", t2.area},
                                       {"boundary_length", t2.boundary_length},
                                       {"ratio", t2.ratio},
                                       {"threshold", t2.threshold},
                                       {"max_distance", t2.max_distance},
                                       {"hemisphere_bound", t2.hemisphere_bound},
                                       {"pass", t2.pass}};
        } else {
            throw ConfigError("unknown analysis '" + a + "'");
        }
    }

    report["checks"] = checks.entries;
    report["all_checks_pass"] = checks.all_pass;

    std::ofstream out(out_dir + "/report.json");
    out << report.dump(2) << "\n";
    return checks.all_pass ? kOk : kCheckFailed;
}

} // namespace

int run_scenario(const std::string& config_path, const RunOptions& options) {
    try {
        return run_scenario_impl(config_path, options);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return kGeometryError;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kSolverError;
    }
}

int export_mesh(const std::string& config_path, const std::string& off_path) {
    try {
        json cfg;
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config file " + config_path);
        try {
            in >> cfg;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        const double c = cfg.contains("c") ? cfg["c"].get<double>() : 0.0;
        const int resolution = cfg.contains("resolution") ? cfg["resolution"].get<int>() : 32;
        if (!cfg.contains("geometry")) throw ConfigError("missing field 'geometry'");
        BuiltGeometry geo = build_geometry(cfg["geometry"], c);
        SurfaceMesh mesh = mesh_patch(geo.patch, resolution);
        std::ofstream off(off_path);
        export_off(mesh, off);
        return kOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return kGeometryError;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kSolverError;
    }
}

} // namespace curvatura
