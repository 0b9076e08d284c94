#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "snse/estimator.hpp"
#include "snse/parallel.hpp"
#include "test_util.hpp"

using namespace snse;
using snse::test::random_real_field;

TEST_CASE("concave transform values") {
    CHECK(concave_transform(0.0, 0.25) == 0.0);
    CHECK(concave_transform(1.0, 0.25) == doctest::Approx(std::pow(std::log(2.0), 0.75)));
    CHECK(concave_transform(1.0, 0.5) == doctest::Approx(std::sqrt(std::log(2.0))));
    CHECK(concave_transform(std::exp(1.0) - 1.0, 0.5) == doctest::Approx(1.0));
    CHECK_THROWS(concave_transform(-0.1, 0.5));
    CHECK_THROWS(concave_transform(1.0, 0.0));
    CHECK_THROWS(concave_transform(1.0, 1.0));
}

TEST_CASE("concave transform is increasing, concave and subadditive") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> ux(0.0, 50.0), ue(0.05, 0.95);
    for (int rep = 0; rep < 2000; ++rep) {
        const double eps = ue(gen);
        double a = ux(gen), b = ux(gen);
        if (a > b) std::swap(a, b);
        CHECK(concave_transform(a, eps) <= concave_transform(b, eps) + 1e-15);
        // midpoint concavity
        const double mid = concave_transform(0.5 * (a + b), eps);
        const double avg = 0.5 * (concave_transform(a, eps) + concave_transform(b, eps));
        CHECK(mid >= avg - 1e-12);
        // subadditivity
        CHECK(concave_transform(a + b, eps) <=
              concave_transform(a, eps) + concave_transform(b, eps) + 1e-12);
    }
}

TEST_CASE("running cost definitions") {
    SpectralField u(2);
    u.set({1, 1}, cplx{3, 0});  // vorticity norm = sqrt(2) * 3
    SpectralField phi_val(2);
    phi_val.set({1, 0}, cplx{0, 4});

    const CostSpec vort{CostKind::Vorticity, 0.5, 1.0, {}};
    CHECK(running_cost(vort, 0.0, u, phi_val) == doctest::Approx(3.0 * std::sqrt(2.0)));

    SpectralField target(2);
    target.set({1, 1}, cplx{1, 0});
    const CostSpec track{CostKind::VTracking, 0.5, 1.0, target};
    // ||u - target||_V = sqrt(2) * 2; ||phi||_H = 4
    CHECK(running_cost(track, 0.0, u, phi_val) ==
          doctest::Approx(2.0 * std::sqrt(2.0) + 4.0));

    CostSpec bad = vort;
    bad.eps = 1.5;
    CHECK_THROWS(running_cost(bad, 0.0, u, phi_val));
    CostSpec missing{CostKind::VTracking, 0.5, 1.0, {}};
    CHECK_THROWS(running_cost(missing, 0.0, u, phi_val));
}

TEST_CASE("path cost is the transform of the running max") {
    Trajectory tr;
    tr.times = {0.0, 0.5, 1.0};
    tr.cost_raw = {std::sqrt(2.0), 2.0, 1.0};  // max raw cost = 2
    const CostSpec spec{CostKind::Vorticity, 0.5, 1.0, {}};
    CHECK(path_cost(tr, spec) == doctest::Approx(std::sqrt(std::log(3.0))));

    // monotone-transform identity: max of transforms == transform of max
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> ux(0.0, 10.0);
    for (int rep = 0; rep < 100; ++rep) {
        Trajectory r;
        double raw_max = 0.0;
        for (int i = 0; i < 20; ++i) {
            r.times.push_back(0.05 * i);
            r.cost_raw.push_back(ux(gen));
            raw_max = std::max(raw_max, r.cost_raw.back());
        }
        CHECK(path_cost(r, spec) == doctest::Approx(concave_transform(raw_max, spec.eps)));
    }

    Trajectory empty;
    CHECK_THROWS(path_cost(empty, spec));
}

TEST_CASE("deterministic decay example") {
    // noise-free single-mode decay: cost_raw is maximal at t = 0, so
    // J = phi(||u0||_V) exactly, here sqrt(log(1 + 2)) for amplitude 2
    SimConfig cfg;
    cfg.trunc_n = 1;
    cfg.nu = 1.0;
    cfg.dt = 1e-3;
    cfg.t_final = 0.5;
    cfg.stop_m = 1e6;
    cfg.stop_mtilde = 10.0;
    cfg.u0 = SpectralField(1);
    cfg.u0.set({1, 0}, cplx{2, 0});
    const CostSpec spec{CostKind::Vorticity, 0.5, 1.0, {}};
    const auto tr = simulate_path(cfg, FeedbackControl::null(0.5), NoiseModel{}, 1, 0,
                                  &spec);
    CHECK(path_cost(tr, spec) == doctest::Approx(std::sqrt(std::log(3.0))));
}

TEST_CASE("estimator mean, CI and scaling") {
    SimConfig cfg;
    cfg.trunc_n = 1;
    cfg.nu = 1.0;
    cfg.dt = 1e-2;
    cfg.t_final = 0.5;
    cfg.stop_m = 1e6;
    cfg.stop_mtilde = 10.0;
    cfg.u0 = SpectralField(1);
    cfg.u0.set({1, 0}, cplx{0.5, 0});
    const NoiseModel g(NoiseKind::Additive, 0.5, 2.0, {{1, 0}});
    const CostSpec spec{CostKind::Vorticity, 0.5, 1.0, {}};
    const auto phi = FeedbackControl::null(0.5);

    const auto e100 = estimate_j(cfg, phi, g, spec, 100, 7);
    const auto e400 = estimate_j(cfg, phi, g, spec, 400, 7);
    CHECK(e100.mean > 0.0);
    CHECK(e100.blowups == 0);
    // CI shrinks roughly like 1/sqrt(n)
    CHECK(e400.ci_half < e100.ci_half);
    CHECK(e400.ci_half > 0.25 * e100.ci_half);
    // estimates agree within joint confidence bands
    CHECK(std::abs(e400.mean - e100.mean) <= 2.0 * (e100.ci_half + e400.ci_half));

    // deterministic problem: zero-width CI, exact mean
    const auto det = estimate_j(cfg, phi, NoiseModel{}, spec, 5, 7);
    CHECK(det.ci_half == doctest::Approx(0.0));
    CHECK(det.mean == doctest::Approx(concave_transform(0.5, 0.5)));

    CHECK_THROWS(estimate_j(cfg, phi, g, spec, 1, 7));
}

TEST_CASE("estimator against a hand-averaged oracle") {
    SimConfig cfg;
    cfg.trunc_n = 1;
    cfg.nu = 1.0;
    cfg.dt = 1e-2;
    cfg.t_final = 0.3;
    cfg.stop_m = 1e6;
    cfg.stop_mtilde = 10.0;
    cfg.u0 = SpectralField(1);
    cfg.u0.set({1, 0}, cplx{0.5, 0});
    const NoiseModel g(NoiseKind::DiagonalMultiplicative, 0.8, 2.0, {{1, 0}});
    const CostSpec spec{CostKind::Vorticity, 0.25, 1.0, {}};
    const auto phi = FeedbackControl::null(0.3);

    const int n = 64;
    double sum = 0.0, sum2 = 0.0;
    for (int p = 0; p < n; ++p) {
        const double c = path_cost(simulate_path(cfg, phi, g, 99, p, &spec), spec);
        sum += c;
        sum2 += c * c;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sum2 - n * mean * mean) / (n - 1));
    const auto est = estimate_j(cfg, phi, g, spec, n, 99);
    CHECK(est.mean == doctest::Approx(mean));
    CHECK(est.ci_half == doctest::Approx(1.96 * sd / std::sqrt(double(n))));
}

TEST_CASE("estimator is independent of the worker count") {
    SimConfig cfg;
    cfg.trunc_n = 2;
    cfg.nu = 0.5;
    cfg.dt = 1e-2;
    cfg.t_final = 0.3;
    cfg.stop_m = 1e6;
    cfg.stop_mtilde = 10.0;
    cfg.u0 = SpectralField(2);
    cfg.u0.set({1, 0}, cplx{0.4, 0});
    cfg.u0.set({-1, 0}, cplx{-0.4, 0});
    const NoiseModel g(NoiseKind::DiagonalMultiplicative, 0.6, 2.0, {{1, 0}, {0, 1}});
    const CostSpec spec{CostKind::Vorticity, 0.5, 1.0, {}};
    const auto phi = FeedbackControl::null(0.3);

    set_threads(1);
    const auto e1 = estimate_j(cfg, phi, g, spec, 50, 31);
    set_threads(8);
    const auto e8 = estimate_j(cfg, phi, g, spec, 50, 31);
    set_threads(3);
    const auto e3 = estimate_j(cfg, phi, g, spec, 50, 31);
    set_threads(0);
    CHECK(e1.mean == e8.mean);
    CHECK(e1.ci_half == e8.ci_half);
    CHECK(e1.mean == e3.mean);
}
