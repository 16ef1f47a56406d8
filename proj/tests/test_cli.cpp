#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "curvatura/scenario.hpp"
#include "doctest.h"

using namespace curvatura;

namespace {

std::string write_config(const std::string& name, const std::string& body) {
    const std::string dir = "cli_test_tmp";
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + name;
    std::ofstream out(path);
    out << body;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("cap scenario runs clean and deterministically") {
    const std::string cfg = write_config("cap.json", R"({
        "name": "cap-smoke",
        "c": 0.0,
        "geometry": {"kind": "cap-in-ball", "R": 1.0, "r": 1.0},
        "resolution": 12,
        "analyses": ["jets", "assemble", "topology", "theorem-check"],
        "tolerances": {}
    })");
    RunOptions opts;
    opts.no_timestamp = true;
    opts.out_dir = "cli_test_tmp/out1";
    CHECK(run_scenario(cfg, opts) == kOk);
    opts.out_dir = "cli_test_tmp/out2";
    CHECK(run_scenario(cfg, opts) == kOk);
    CHECK(slurp("cli_test_tmp/out1/report.json") == slurp("cli_test_tmp/out2/report.json"));
    CHECK(!slurp("cli_test_tmp/out1/report.json").empty());
}

TEST_CASE("missing geometry field gives status 2 naming the field") {
    const std::string cfg = write_config("bad.json", R"({
        "name": "bad",
        "c": 0.0,
        "geometry": {"kind": "cap-in-ball", "r": 1.0},
        "resolution": 8,
        "analyses": ["jets"]
    })");
    RunOptions opts;
    opts.out_dir = "cli_test_tmp/out_bad";
    CHECK(run_scenario(cfg, opts) == kConfigError);
}

TEST_CASE("unknown fields are rejected") {
    const std::string cfg = write_config("unknown.json", R"({
        "name": "unknown",
        "c": 0.0,
        "geometry": {"kind": "cap-in-ball", "R": 1.0, "r": 1.0},
        "resolution": 8,
        "analyses": ["jets"],
        "surprise": 1
    })");
    RunOptions opts;
    opts.out_dir = "cli_test_tmp/out_unknown";
    CHECK(run_scenario(cfg, opts) == kConfigError);
}

TEST_CASE("geometry errors give status 3") {
    const std::string cfg = write_config("geom.json", R"({
        "name": "geom",
        "c": 1.0,
        "geometry": {"kind": "cap-in-ball", "R": 2.5, "r": 0.5},
        "resolution": 8,
        "analyses": ["jets"]
    })");
    RunOptions opts;
    opts.out_dir = "cli_test_tmp/out_geom";
    CHECK(run_scenario(cfg, opts) == kGeometryError);
}

TEST_CASE("rotational-slab shooting failure gives status 4") {
    const std::string cfg = write_config("slab.json", R"({
        "name": "slab",
        "c": 0.0,
        "geometry": {"kind": "rotational-slab", "H2": 1.0, "seed": 0.8},
        "resolution": 8,
        "analyses": ["jets"]
    })");
    RunOptions opts;
    opts.out_dir = "cli_test_tmp/out_slab";
    CHECK(run_scenario(cfg, opts) == kSolverError);
}

TEST_CASE("custom catalog patch and mesh export") {
    const std::string patch = write_config("hemi.json", R"({
        "catalog": "cap-on-plane", "r": 1.0, "h": 0.0
    })");
    const std::string cfg = write_config("hemi_scenario.json", std::string(R"({
        "name": "hemi",
        "c": 0.0,
        "geometry": {"kind": "custom-patch", "file": ")") + patch + R"("},
        "resolution": 10,
        "analyses": ["jets", "assemble"]
    })");
    RunOptions opts;
    opts.out_dir = "cli_test_tmp/out_hemi";
    CHECK(run_scenario(cfg, opts) == kOk);
    CHECK(export_mesh(cfg, "cli_test_tmp/hemi.off") == kOk);
    std::ifstream off("cli_test_tmp/hemi.off");
    std::string header;
    off >> header;
    CHECK(header == "OFF");
}

TEST_CASE("stability scenario with expectation") {
    const std::string cfg = write_config("stab.json", R"({
        "name": "cap-stability",
        "c": 0.0,
        "geometry": {"kind": "cap-in-ball", "R": 1.0, "r": 1.0},
        "resolution": 16,
        "analyses": ["stability"],
        "tolerances": {"stability": true}
    })");
    RunOptions opts;
    opts.no_timestamp = true;
    opts.out_dir = "cli_test_tmp/out_stab";
    CHECK(run_scenario(cfg, opts) == kOk);
}

TEST_CASE("describe lists the geometry kinds") {
    const std::string desc = describe_scenarios();
    CHECK(desc.find("cap-in-ball") != std::string::npos);
    CHECK(desc.find("rotational-slab") != std::string::npos);
    CHECK(desc.find("analyses") != std::string::npos);
}

} // TEST_SUITE
