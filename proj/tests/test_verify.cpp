#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "snse/verify.hpp"
#include "test_util.hpp"

using namespace snse;

namespace {

SimConfig small_config() {
    SimConfig cfg;
    cfg.trunc_n = 2;
    cfg.nu = 1.0;
    cfg.dt = 0.01;
    cfg.t_final = 0.3;
    cfg.stop_m = 1e3;
    cfg.stop_mtilde = 1.0;
    cfg.u0 = SpectralField(2);
    cfg.u0.set({1, 0}, cplx{0.3, 0});
    cfg.u0.set({-1, 0}, cplx{-0.3, 0});
    return cfg;
}

FeedbackControl small_control(double horizon) {
    std::vector<ControlEntry> entries;
    entries.push_back({{1, 0}, {{0.0, horizon}, {-0.5, -0.2}},
                       TimeProfile<cplx>::constant(horizon, cplx{0.05, 0.0})});
    entries.push_back({{0, 1}, TimeProfile<double>::constant(horizon, -0.3),
                       TimeProfile<cplx>::constant(horizon, cplx{})});
    return FeedbackControl(horizon, 1e6, 10.0, std::move(entries));
}

}  // namespace

TEST_CASE("subadditivity sweep finds no violations") {
    const auto rep = subadditivity_check(0.5, 100000, 99);
    CHECK(rep.samples == 100000);
    CHECK(rep.violations == 0);
    CHECK(rep.max_slack <= 1e-12);

    const auto rep2 = subadditivity_check(0.25, 50000, 7);
    CHECK(rep2.violations == 0);

    CHECK_THROWS(subadditivity_check(0.0, 10, 1));
    CHECK_THROWS(subadditivity_check(1.0, 10, 1));
}

TEST_CASE("subadditivity worked example") {
    // |phi(3) - phi(1)| <= phi(2) for eps = 1/2:
    // sqrt(log 4) - sqrt(log 2) < sqrt(log 3)
    const double lhs = std::sqrt(std::log(4.0)) - std::sqrt(std::log(2.0));
    CHECK(lhs == doctest::Approx(concave_transform(3.0, 0.5) - concave_transform(1.0, 0.5)));
    CHECK(lhs < std::sqrt(std::log(3.0)));
}

TEST_CASE("gronwall hand instance: constant 8 with two blocks") {
    const auto g = gronwall_hand_instance();
    const auto v = gronwall_check(g);
    CHECK(v.n_blocks == 2);
    CHECK(v.c_effective == doctest::Approx(8.0));
    CHECK(v.holds);
}

TEST_CASE("gronwall trivial instance: no r-mass gives C = c0") {
    GronwallInstance g;
    g.c0 = 2.0;
    g.kappa = 1.0;
    g.t = {0.0, 0.5, 1.0};
    g.x = {1.0, 1.0, 1.0};
    g.y = {0.0, 0.0, 0.0};
    g.z = {1.0, 1.0, 1.0};
    g.r = {0.0, 0.0, 0.0};
    const auto v = gronwall_check(g);
    CHECK(v.n_blocks == 1);
    CHECK(v.c_effective == doctest::Approx(2.0));
    CHECK(v.holds);
}

TEST_CASE("gronwall precondition validation") {
    auto base = gronwall_hand_instance();

    auto bad = base;
    bad.c0 = 0.5;
    CHECK_THROWS(gronwall_check(bad));

    bad = base;
    bad.x[3] = -1.0;
    CHECK_THROWS(gronwall_check(bad));

    bad = base;
    bad.kappa = 0.99;  // total r-mass is 1.0
    CHECK_THROWS(gronwall_check(bad));

    bad = base;
    bad.t[5] = bad.t[4];  // non-increasing grid
    CHECK_THROWS(gronwall_check(bad));

    // local inequality violated: x jumps with no drive at all
    GronwallInstance jump;
    jump.c0 = 1.0;
    jump.kappa = 1.0;
    jump.t = {0.0, 1.0};
    jump.x = {0.0, 1.0};
    jump.y = {0.0, 0.0};
    jump.z = {0.0, 0.0};
    jump.r = {0.0, 0.0};
    CHECK_THROWS(gronwall_check(jump));

    bad = base;
    bad.x.pop_back();
    CHECK_THROWS(gronwall_check(bad));
}

TEST_CASE("randomized gronwall instances all satisfy the bound") {
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto g = make_gronwall_instance(4242, i);
        const auto v = gronwall_check(g);
        CHECK(v.holds);
        CHECK(v.c_effective >= g.c0);
        CHECK(v.n_blocks >= 1);
    }
}

TEST_CASE("continuity experiment: shape, CRN flag and pass") {
    const auto cfg = small_config();
    const auto phi = small_control(cfg.t_final);
    const NoiseModel g(NoiseKind::DiagonalMultiplicative, 0.3, 2.0, {{1, 0}, {0, 1}});
    const CostSpec spec{CostKind::Vorticity, 0.5, 1.0, {}};
    const auto res = continuity_experiment(cfg, phi, g, spec,
                                           SequenceScheme::GainScale, {1, 2, 4, 8}, 24,
                                           2025);
    CHECK(res.ok());
    REQUIRE(res.table.rows.size() == 4);
    CHECK(res.table.columns.size() == 7);
    // lv_distance halves with n for the gain-scale scheme
    for (std::size_t i = 0; i + 1 < res.table.rows.size(); ++i)
        CHECK(res.table.rows[i + 1][1] < res.table.rows[i][1]);
    bool crn = false;
    for (const auto& [k, v] : res.table.meta)
        if (k == "crn_replay_ok") crn = (v == "1");
    CHECK(crn);
    CHECK_THROWS(continuity_experiment(cfg, phi, g, spec, SequenceScheme::GainScale,
                                       {}, 24, 2025));
}

TEST_CASE("continuity is exact once the truncation covers every mode") {
    const auto cfg = small_config();
    const auto phi = small_control(cfg.t_final);
    const NoiseModel g(NoiseKind::Additive, 0.2, 2.0, {{1, 0}});
    const CostSpec spec{CostKind::Vorticity, 0.5, 1.0, {}};
    const auto res = continuity_experiment(cfg, phi, g, spec,
                                           SequenceScheme::ModeTruncate, {1, 2}, 8, 1);
    CHECK(res.ok());
    // n = 2 covers modes (1,0) and (0,1): phi_2 = phi, so dJ and sup-diff vanish
    CHECK(res.table.rows[1][1] == 0.0);  // lv_distance
    CHECK(res.table.rows[1][4] == doctest::Approx(0.0));  // abs_dj
    CHECK(res.table.rows[1][6] == doctest::Approx(0.0));  // coupled_sup_diff
}

TEST_CASE("solution convergence experiment") {
    const auto cfg = small_config();
    const auto phi = small_control(cfg.t_final);
    const NoiseModel g(NoiseKind::DiagonalMultiplicative, 0.3, 2.0, {{1, 0}, {0, 1}});
    const auto res = solution_convergence_experiment(cfg, phi, g,
                                                     SequenceScheme::GainScale,
                                                     {1, 2, 4, 8}, 24, 0.01, 11);
    CHECK(res.ok());
    REQUIRE(res.table.rows.size() == 4);
    CHECK(res.table.columns.size() == 6);
    for (const auto& row : res.table.rows) {
        CHECK(row[2] >= 0.0);               // integral of a square
        CHECK(row[4] >= 0.0);               // conditioning fraction
        CHECK(row[4] <= 1.0);
        CHECK(row[5] >= 0.0);               // probability
        CHECK(row[5] <= 1.0);
    }

    auto bad = cfg;
    bad.u0 *= 10.0;  // ||u0||_V > stop_mtilde
    CHECK_THROWS(solution_convergence_experiment(bad, phi, g, SequenceScheme::GainScale,
                                                 {1, 2}, 8, 0.01, 11));
}

TEST_CASE("tail experiment probabilities shrink with S") {
    auto cfg = small_config();
    cfg.stop_m = 1.05;  // threshold = mtilde^2 + (m-1)^2 just above ||u0||_V^2
    cfg.stop_mtilde = 0.5;
    cfg.u0 = SpectralField(2);
    cfg.u0.set({1, 0}, cplx{0.3, 0});
    cfg.u0.set({-1, 0}, cplx{-0.3, 0});
    const NoiseModel g(NoiseKind::Additive, 0.6, 2.0, {{1, 0}, {0, 1}});
    const auto phi = FeedbackControl::null(cfg.t_final);
    const auto res = tail_experiment(cfg, phi, g, {0.3, 0.15, 0.05}, 200, 5);
    CHECK(res.ok());
    REQUIRE(res.table.rows.size() == 3);
    // descending S-list: probabilities read nonincreasing within CI slack
    CHECK(res.table.rows[0][1] >= res.table.rows[2][1] - 1e-12);
    for (const auto& row : res.table.rows) {
        CHECK(row[1] >= 0.0);
        CHECK(row[1] <= 1.0);
    }
    CHECK_THROWS(tail_experiment(cfg, phi, g, {1.0}, 10, 5));  // S > T
}

TEST_CASE("log-moment experiment: finite and dt-stable") {
    const auto cfg = small_config();
    const auto phi = FeedbackControl::null(cfg.t_final);
    const NoiseModel g(NoiseKind::DiagonalMultiplicative, 0.4, 2.0, {{1, 0}, {0, 1}});
    const auto res = log_moment_experiment(cfg, phi, g, {0.004, 0.002, 0.001},
                                           {0.1, 0.2}, 32, 13);
    CHECK(res.ok());
    CHECK(res.table.rows.size() == 6);
    for (const auto& row : res.table.rows) CHECK(std::isfinite(row[2]));

    CHECK_THROWS(log_moment_experiment(cfg, phi, g, {0.003, 0.002}, {0.1}, 8, 13));
    CHECK_THROWS(log_moment_experiment(cfg, phi, g, {}, {0.1}, 8, 13));
}
