#include <Eigen/Core>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "curvatura/scenario.hpp"

int main(int argc, char** argv) {
    // CURVATURA_THREADS caps internal linear-algebra parallelism.
    if (const char* threads = std::getenv("CURVATURA_THREADS")) {
        const int n = std::atoi(threads);
        if (n > 0) Eigen::setNbThreads(n);
    }

    CLI::App app{"curvatura: numerical audits of H2 surfaces with free or capillary boundary"};
    app.require_subcommand(1);

    std::string config_path, out_dir, off_path;
    bool no_timestamp = false;

    CLI::App* run = app.add_subcommand("run", "run a scenario config and write report.json");
    run->add_option("config", config_path, "scenario config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (overrides the config)");
    run->add_flag("--no-timestamp", no_timestamp, "omit the timestamp from report.json");

    CLI::App* list = app.add_subcommand("list-scenarios", "describe geometry kinds and analyses");

    CLI::App* exp = app.add_subcommand("export-mesh", "mesh the scenario geometry to an OFF file");
    exp->add_option("config", config_path, "scenario config (JSON)")->required();
    exp->add_option("file", off_path, "output OFF path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : curvatura::kConfigError;
    }

    if (run->parsed()) {
        curvatura::RunOptions opts;
        opts.out_dir = out_dir;
        opts.no_timestamp = no_timestamp;
        return curvatura::run_scenario(config_path, opts);
    }
    if (list->parsed()) {
        std::cout << curvatura::describe_scenarios();
        return 0;
    }
    if (exp->parsed()) return curvatura::export_mesh(config_path, off_path);
    return 0;
}
