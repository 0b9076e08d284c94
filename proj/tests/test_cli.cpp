#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "snse/csv.hpp"
#include "snse/parallel.hpp"
#include "snse/run.hpp"

using namespace snse;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    static const fs::path d = [] {
        auto p = fs::temp_directory_path() / "snse_cli_tests";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return d;
}

fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = scratch_dir() / name;
    std::ofstream out(p);
    out << body;
    return p;
}

std::string csv_body(const fs::path& p) {
    // everything except '#' metadata lines, which may carry wall time
    std::ifstream in(p);
    std::ostringstream body;
    std::string line;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') body << line << "\n";
    return body.str();
}

const std::string kBaseConfig = R"(# minimal simulation block
sim.trunc_n = 2
sim.nu = 1.0
sim.dt = 0.01
sim.t_final = 0.2
sim.stop_m = 1000
sim.stop_mtilde = 2.0
u0.modes = 1:0:0.3:0, -1:0:-0.3:0
noise.kind = diagonal-multiplicative
noise.sigma = 0.4
noise.alpha = 2.0
noise.modes = 1:0, 0:1
mc.paths = 8
mc.seed = 42
)";

}  // namespace

TEST_CASE("full config round-trip") {
    const auto p = write_config("full.cfg", kBaseConfig + R"(control.cap_k = 50
control.state_radius = 5
control.gains = 1:0:-0.5:-0.1, 0:1:0.25
control.base = 1:0:0.1:-0.2
cost.kind = vorticity
cost.eps = 0.25
mc.label = demo
experiment.n_list = 1, 2, 4
experiment.scheme = gain-scale
experiment.s_list = 0.2, 0.1
experiment.delta = 0.05
)");
    const RunSpec spec = parse_config(p.string());
    CHECK(spec.sim.trunc_n == 2);
    CHECK(spec.sim.nu == 1.0);
    CHECK(spec.sim.dt == 0.01);
    CHECK(spec.sim.t_final == 0.2);
    CHECK(spec.sim.u0.at({1, 0}).real() == doctest::Approx(0.3));
    CHECK(spec.sim.u0.at({-1, 0}).real() == doctest::Approx(-0.3));
    CHECK(spec.noise.kind() == NoiseKind::DiagonalMultiplicative);
    CHECK(spec.noise.sigma() == 0.4);
    CHECK(spec.noise.forced_modes().size() == 2);

    REQUIRE(spec.control.has_value());
    CHECK(spec.control->cap_k() == 50.0);
    CHECK(spec.control->state_radius() == 5.0);
    REQUIRE(spec.control->entries().size() == 2);
    // two-value gain list becomes a linear ramp over [0, T]
    const auto& e10 = spec.control->entries()[1].k == Mode{1, 0}
                          ? spec.control->entries()[1]
                          : spec.control->entries()[0];
    CHECK(e10.gain.eval(0.0) == doctest::Approx(-0.5));
    CHECK(e10.gain.eval(0.2) == doctest::Approx(-0.1));
    CHECK(e10.gain.eval(0.1) == doctest::Approx(-0.3));
    CHECK(e10.base.eval(0.1).real() == doctest::Approx(0.1));
    CHECK(e10.base.eval(0.1).imag() == doctest::Approx(-0.2));

    REQUIRE(spec.cost.has_value());
    CHECK(spec.cost->kind == CostKind::Vorticity);
    CHECK(spec.cost->eps == 0.25);
    CHECK(spec.mc_paths == 8);
    CHECK(spec.mc_seed == 42);
    CHECK(spec.label == "demo");
    CHECK(spec.n_list == std::vector<int>{1, 2, 4});
    CHECK(spec.scheme == SequenceScheme::GainScale);
    CHECK(spec.s_list == std::vector<double>{0.2, 0.1});
    CHECK(spec.delta == 0.05);
    CHECK(!spec.echo.empty());
}

TEST_CASE("null control when no control block is present") {
    const auto p = write_config("nocontrol.cfg", kBaseConfig);
    const RunSpec spec = parse_config(p.string());
    CHECK(!spec.control.has_value());
    const auto phi = spec.effective_control();
    CHECK(phi.entries().empty());
    CHECK(phi.horizon() == doctest::Approx(0.2));
}

TEST_CASE("unknown keys are fatal with a line number") {
    const auto p = write_config("typo.cfg", R"(sim.trunc_n = 2
noise.sgima = 0.4
)");
    try {
        parse_config(p.string());
        FAIL("expected a parse error");
    } catch (const std::exception& ex) {
        const std::string msg = ex.what();
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("noise.sgima") != std::string::npos);
    }
}

TEST_CASE("constraint violations carry the offending key") {
    const auto p = write_config("badeps.cfg", kBaseConfig + R"(cost.kind = vorticity
cost.eps = 1.5
)");
    try {
        parse_config(p.string());
        FAIL("expected a parse error");
    } catch (const std::exception& ex) {
        const std::string msg = ex.what();
        CHECK(msg.find("cost.eps") != std::string::npos);
        CHECK(msg.find("(0,1)") != std::string::npos);
    }
}

TEST_CASE("malformed lines and duplicates are fatal") {
    const auto dup = write_config("dup.cfg", kBaseConfig + "mc.seed = 43\n");
    CHECK_THROWS(parse_config(dup.string()));

    const auto noeq = write_config("noeq.cfg", "sim.trunc_n 2\n");
    CHECK_THROWS(parse_config(noeq.string()));

    const auto badnum = write_config("badnum.cfg",
                                     kBaseConfig + "experiment.delta = fast\n");
    CHECK_THROWS(parse_config(badnum.string()));

    CHECK_THROWS(parse_config((scratch_dir() / "missing.cfg").string()));

    // u0 outside the truncation band
    const auto far = write_config("far.cfg", R"(sim.trunc_n = 1
sim.nu = 1.0
sim.dt = 0.01
sim.t_final = 0.2
sim.stop_m = 1000
sim.stop_mtilde = 2.0
u0.modes = 2:0:1:0
noise.kind = off
mc.paths = 4
mc.seed = 1
)");
    CHECK_THROWS(parse_config(far.string()));
}

TEST_CASE("simulate writes deterministic CSV bodies") {
    const auto p = write_config("sim.cfg", kBaseConfig + R"(cost.kind = vorticity
cost.eps = 0.5
)");
    const RunSpec spec = parse_config(p.string());

    const auto out1 = scratch_dir() / "run1";
    const auto out2 = scratch_dir() / "run2";
    set_threads(1);
    CHECK(run("simulate", spec, out1.string()) == 0);
    set_threads(8);
    CHECK(run("simulate", spec, out2.string()) == 0);
    set_threads(1);

    const auto b1 = csv_body(out1 / "trajectory.csv");
    const auto b2 = csv_body(out2 / "trajectory.csv");
    CHECK(!b1.empty());
    CHECK(b1 == b2);

    // long-format body: header plus (paths x grid points) rows
    std::istringstream is(b1);
    std::string header;
    std::getline(is, header);
    CHECK(header == "path,time,vnorm2,anorm2_int,cost_raw");
    std::size_t rows = 0;
    for (std::string l; std::getline(is, l);)
        if (!l.empty()) ++rows;
    CHECK(rows == 8 * 21);  // 8 paths, 20 steps + initial sample

    // per-path layout
    const auto out3 = scratch_dir() / "run3";
    CHECK(run("simulate", spec, out3.string(), false) == 0);
    CHECK(fs::exists(out3 / "trajectory_path0000.csv"));
    CHECK(fs::exists(out3 / "trajectory_path0007.csv"));
}

TEST_CASE("cost subcommand appends labelled rows") {
    const auto p = write_config("cost.cfg", kBaseConfig + R"(cost.kind = vorticity
cost.eps = 0.5
mc.label = first
)");
    RunSpec spec = parse_config(p.string());
    const auto out = scratch_dir() / "costrun";
    fs::remove_all(out);
    CHECK(run("cost", spec, out.string()) == 0);
    spec.label = "second";
    spec.mc_seed = 43;
    CHECK(run("cost", spec, out.string()) == 0);

    const auto body = csv_body(out / "cost.csv");
    std::istringstream is(body);
    std::vector<std::string> lines;
    for (std::string l; std::getline(is, l);)
        if (!l.empty()) lines.push_back(l);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "label,n_paths,seed,mean,ci_half,blowups");
    CHECK(lines[1].rfind("first,8,42,", 0) == 0);
    CHECK(lines[2].rfind("second,8,43,", 0) == 0);
}

TEST_CASE("experiment subcommands demand their blocks") {
    const auto p = write_config("bare.cfg", kBaseConfig);
    const RunSpec spec = parse_config(p.string());
    const auto out = (scratch_dir() / "blocks").string();
    CHECK_THROWS(run("cost", spec, out));        // no cost block
    CHECK_THROWS(run("continuity", spec, out));  // no n_list/scheme
    CHECK_THROWS(run("tail", spec, out));        // no s_list
    CHECK_THROWS(run("logmoment", spec, out));   // no dt_list
    CHECK_THROWS(run("optimize", spec, out));    // no slots/budget
    CHECK_THROWS(run("nonsense", spec, out));
}

TEST_CASE("gronwall and subadd subcommands emit tables and succeed") {
    const auto p = write_config("gron.cfg", kBaseConfig + R"(cost.kind = vorticity
cost.eps = 0.5
experiment.samples = 20000
experiment.instances = 25
)");
    const RunSpec spec = parse_config(p.string());
    const auto out = scratch_dir() / "gron";
    CHECK(run("gronwall", spec, out.string()) == 0);
    CHECK(run("subadd", spec, out.string()) == 0);

    const auto gb = csv_body(out / "gronwall.csv");
    std::istringstream is(gb);
    std::string header;
    std::getline(is, header);
    CHECK(header == "instance,n_blocks,c_effective,holds");
    std::size_t rows = 0;
    std::string first_row;
    for (std::string l; std::getline(is, l);)
        if (!l.empty()) {
            if (rows == 0) first_row = l;
            ++rows;
        }
    CHECK(rows == 26);  // hand instance + 25 randomized
    CHECK(first_row == "0,2,8,1");

    const auto sb = csv_body(out / "subadd.csv");
    CHECK(sb.find("samples,violations,max_slack") != std::string::npos);
    CHECK(sb.find("20000,0,") != std::string::npos);
}

TEST_CASE("fmt17 round-trips doubles") {
    for (double x : {0.1, 1.0 / 3.0, 12345.6789, 1e-300, -2.5e17}) {
        CHECK(std::stod(fmt17(x)) == x);
    }
    CHECK(fmt17(0.0) == "0");
}
