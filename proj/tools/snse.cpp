#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "snse/parallel.hpp"
#include "snse/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Feedback-controlled 2D stochastic Navier-Stokes simulator and "
                 "verification suite"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::uint64_t seed_override = 0;
    int paths_override = -1;
    int threads = 0;
    bool per_path_files = false;
    bool have_seed = false;

    const char* subcommands[] = {"simulate", "cost",    "continuity",
                                 "convergence", "tail", "logmoment",
                                 "subadd",   "gronwall", "optimize"};
    for (const char* name : subcommands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed_override, "override mc.seed")
            ->each([&](const std::string&) { have_seed = true; });
        sub->add_option("--paths", paths_override, "override mc.paths");
        sub->add_option("--threads", threads, "worker threads (0 = hardware)");
        if (std::string(name) == "simulate")
            sub->add_flag("--per-path-files", per_path_files,
                          "one trajectory CSV per path instead of a long-format file");
    }

    CLI11_PARSE(app, argc, argv);
    if (threads > 0) snse::set_threads(threads);

    try {
        snse::RunSpec spec = snse::parse_config(config_path);
        if (have_seed) spec.mc_seed = seed_override;
        if (paths_override > 0) spec.mc_paths = paths_override;
        const std::string cmd = app.get_subcommands().front()->get_name();
        return snse::run(cmd, spec, out_dir, !per_path_files);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
