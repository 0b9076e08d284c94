#include "snse/run.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "snse/csv.hpp"
#include "snse/parallel.hpp"

namespace snse {

namespace {

constexpr const char* kVersion = "0.1.0";

void add_common_meta(Table& t, const RunSpec& spec, double wall_s) {
    for (const auto& [k, v] : spec.echo) t.add_meta("config." + k, v);
    t.add_meta("seed", std::to_string(spec.mc_seed));
    t.add_meta("artifact_version", kVersion);
    t.add_meta("threads", std::to_string(thread_count()));
    t.add_meta("wall_time_s", fmt17(wall_s));
}

void require_block(bool ok, const std::string& what) {
    if (!ok)
        throw std::invalid_argument("this subcommand requires " + what +
                                    " in the configuration");
}

int emit(const RunSpec& spec, ExperimentResult res, const std::string& path,
         double wall_s) {
    add_common_meta(res.table, spec, wall_s);
    write_table_csv(path, res.table);
    for (const auto& f : res.failures)
        std::cerr << "assertion failed: " << f << "\n";
    return res.ok() ? 0 : 2;
}

}  // namespace

int run(const std::string& cmd, const RunSpec& spec, const std::string& out_dir,
        bool long_format) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir))
        throw std::invalid_argument("output directory '" + out_dir + "' is not writable");
    const auto t0 = std::chrono::steady_clock::now();
    auto wall = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    };
    const FeedbackControl phi = spec.effective_control();
    const CostSpec* cost = spec.cost ? &*spec.cost : nullptr;

    if (cmd == "simulate") {
        std::vector<Trajectory> trajs(spec.mc_paths);
        parallel_for(spec.mc_paths, [&](std::size_t p) {
            trajs[p] = simulate_path(spec.sim, phi, spec.noise, spec.mc_seed, p, cost);
        });
        auto make_table = [&](bool with_path) {
            Table t;
            if (with_path) t.columns = {"path", "time", "vnorm2", "anorm2_int", "cost_raw"};
            else t.columns = {"time", "vnorm2", "anorm2_int", "cost_raw"};
            return t;
        };
        if (long_format) {
            Table t = make_table(true);
            for (std::size_t p = 0; p < trajs.size(); ++p)
                for (std::size_t i = 0; i < trajs[p].times.size(); ++i)
                    t.rows.push_back({double(p), trajs[p].times[i], trajs[p].vnorm2[i],
                                      trajs[p].anorm2_int[i], trajs[p].cost_raw[i]});
            add_common_meta(t, spec, wall());
            write_table_csv((fs::path(out_dir) / "trajectory.csv").string(), t);
        } else {
            for (std::size_t p = 0; p < trajs.size(); ++p) {
                Table t = make_table(false);
                for (std::size_t i = 0; i < trajs[p].times.size(); ++i)
                    t.rows.push_back({trajs[p].times[i], trajs[p].vnorm2[i],
                                      trajs[p].anorm2_int[i], trajs[p].cost_raw[i]});
                add_common_meta(t, spec, wall());
                char name[64];
                std::snprintf(name, sizeof(name), "trajectory_path%04zu.csv", p);
                write_table_csv((fs::path(out_dir) / name).string(), t);
            }
        }
        return 0;
    }

    if (cmd == "cost") {
        require_block(cost != nullptr, "a cost block");
        const JEstimate e =
            estimate_j(spec.sim, phi, spec.noise, *cost, spec.mc_paths, spec.mc_seed);
        const fs::path path = fs::path(out_dir) / "cost.csv";
        const bool exists = fs::exists(path) && fs::file_size(path) > 0;
        std::ofstream out(path, std::ios::app);
        if (!exists) {
            Table hdr;
            add_common_meta(hdr, spec, wall());
            for (const auto& [k, v] : hdr.meta) out << "# " << k << " = " << v << "\n";
            out << "label,n_paths,seed,mean,ci_half,blowups\n";
        }
        out << spec.label << "," << spec.mc_paths << "," << spec.mc_seed << ","
            << fmt17(e.mean) << "," << fmt17(e.ci_half) << "," << e.blowups << "\n";
        return 0;
    }

    if (cmd == "continuity") {
        require_block(cost != nullptr, "a cost block");
        require_block(!spec.n_list.empty(), "experiment.n_list");
        require_block(spec.scheme.has_value(), "experiment.scheme");
        ExperimentResult res =
            continuity_experiment(spec.sim, phi, spec.noise, *cost, *spec.scheme,
                                  spec.n_list, spec.mc_paths, spec.mc_seed);
        return emit(spec, std::move(res),
                    (fs::path(out_dir) / "continuity.csv").string(), wall());
    }

    if (cmd == "convergence") {
        require_block(!spec.n_list.empty(), "experiment.n_list");
        require_block(spec.scheme.has_value(), "experiment.scheme");
        ExperimentResult res = solution_convergence_experiment(
            spec.sim, phi, spec.noise, *spec.scheme, spec.n_list, spec.mc_paths,
            spec.delta, spec.mc_seed);
        return emit(spec, std::move(res),
                    (fs::path(out_dir) / "convergence.csv").string(), wall());
    }

    if (cmd == "tail") {
        require_block(!spec.s_list.empty(), "experiment.s_list");
        ExperimentResult res = tail_experiment(spec.sim, phi, spec.noise, spec.s_list,
                                               spec.mc_paths, spec.mc_seed);
        return emit(spec, std::move(res), (fs::path(out_dir) / "tail.csv").string(),
                    wall());
    }

    if (cmd == "logmoment") {
        require_block(!spec.dt_list.empty(), "experiment.dt_list");
        require_block(!spec.t_list.empty(), "experiment.t_list");
        ExperimentResult res =
            log_moment_experiment(spec.sim, phi, spec.noise, spec.dt_list, spec.t_list,
                                  spec.mc_paths, spec.mc_seed);
        return emit(spec, std::move(res),
                    (fs::path(out_dir) / "logmoment.csv").string(), wall());
    }

    if (cmd == "subadd") {
        require_block(cost != nullptr, "a cost block (for eps)");
        const SubadditivityReport rep =
            subadditivity_check(cost->eps, spec.samples, spec.mc_seed);
        Table t;
        t.add_meta("experiment", "subadd");
        t.columns = {"samples", "violations", "max_slack"};
        t.rows.push_back({double(rep.samples), double(rep.violations), rep.max_slack});
        add_common_meta(t, spec, wall());
        write_table_csv((fs::path(out_dir) / "subadd.csv").string(), t);
        if (rep.violations > 0)
            std::cerr << "assertion failed: " << rep.violations
                      << " subadditivity violations\n";
        return rep.violations == 0 ? 0 : 2;
    }

    if (cmd == "gronwall") {
        Table t;
        t.add_meta("experiment", "gronwall");
        t.columns = {"instance", "n_blocks", "c_effective", "holds"};
        int bad = 0;
        {
            const GronwallVerdict v = gronwall_check(gronwall_hand_instance());
            t.rows.push_back({0.0, double(v.n_blocks), v.c_effective, v.holds ? 1.0 : 0.0});
            if (!v.holds) ++bad;
        }
        for (int i = 1; i <= spec.instances; ++i) {
            const GronwallVerdict v =
                gronwall_check(make_gronwall_instance(spec.mc_seed, i));
            t.rows.push_back({double(i), double(v.n_blocks), v.c_effective,
                              v.holds ? 1.0 : 0.0});
            if (!v.holds) ++bad;
        }
        add_common_meta(t, spec, wall());
        write_table_csv((fs::path(out_dir) / "gronwall.csv").string(), t);
        if (bad > 0)
            std::cerr << "assertion failed: " << bad << " Gronwall instances without "
                      << "a valid conclusion\n";
        return bad == 0 ? 0 : 2;
    }

    if (cmd == "optimize") {
        require_block(cost != nullptr, "a cost block");
        require_block(!spec.opt_slots.empty(), "experiment.slots");
        require_block(spec.budget > 0, "experiment.budget");
        ParamBox box;
        box.slots = spec.opt_slots;
        box.lower = spec.opt_lower;
        box.upper = spec.opt_upper;
        box.horizon = spec.sim.t_final;
        box.cap_k = spec.control ? spec.control->cap_k() : 1e6;
        box.state_radius = spec.sim.stop_m + spec.sim.stop_mtilde;
        const MinimizeResult r = minimize(box, spec.sim, spec.noise, *cost,
                                          spec.mc_paths, spec.mc_seed, spec.budget);
        Table t;
        t.add_meta("experiment", "optimize");
        t.add_meta("j_star", fmt17(r.j_star));
        for (std::size_t j = 0; j < r.theta_star.size(); ++j)
            t.add_meta("theta_star_" + std::to_string(j), fmt17(r.theta_star[j]));
        t.columns = {"eval_index"};
        for (std::size_t j = 0; j < box.dims(); ++j)
            t.columns.push_back("theta_" + std::to_string(j));
        t.columns.push_back("objective");
        t.columns.push_back("phase");  // 0 = grid, 1 = simplex
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
            std::vector<double> row{double(i)};
            for (double th : r.trace[i].theta) row.push_back(th);
            row.push_back(r.trace[i].objective);
            row.push_back(r.trace[i].phase == "grid" ? 0.0 : 1.0);
            t.rows.push_back(std::move(row));
        }
        add_common_meta(t, spec, wall());
        write_table_csv((fs::path(out_dir) / "optimize.csv").string(), t);
        return 0;
    }

    throw std::invalid_argument("unknown subcommand '" + cmd + "'");
}

}  // namespace snse
