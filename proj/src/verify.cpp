#include "snse/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "snse/parallel.hpp"

namespace snse {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

const char* scheme_name(SequenceScheme s) {
    switch (s) {
        case SequenceScheme::GainScale: return "gain-scale";
        case SequenceScheme::ModeTruncate: return "mode-truncate";
        case SequenceScheme::TimeMollify: return "time-mollify";
    }
    return "?";
}

double binom_ci(double p, int n) {
    return 1.96 * std::sqrt(std::max(0.0, p * (1.0 - p)) / n);
}

struct MeanCi {
    double mean = 0.0;
    double ci = 0.0;
};

MeanCi mean_ci(const std::vector<double>& v) {
    MeanCi r;
    if (v.empty()) return r;
    for (double x : v) r.mean += x;
    r.mean /= v.size();
    if (v.size() < 2) return r;
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.ci = 1.96 * std::sqrt(ss / (v.size() - 1)) / std::sqrt(double(v.size()));
    return r;
}

/// CI-aware monotone trend: flags index i when value[i+1] exceeds value[i]
/// beyond the combined interval widths.
void check_trend(const std::vector<double>& value, const std::vector<double>& ci,
                 const std::string& label, std::vector<std::string>& failures) {
    for (std::size_t i = 0; i + 1 < value.size(); ++i) {
        if (value[i + 1] > value[i] + ci[i] + ci[i + 1]) {
            failures.push_back(label + " not nonincreasing at step " +
                               std::to_string(i) + ": " + fmt(value[i]) + " -> " +
                               fmt(value[i + 1]));
        }
    }
}

/// Replays the first increments of path 0 twice; the counter-based streams
/// must agree for CRN coupling to be meaningful.
bool crn_replay_ok(const NoiseModel& g, const SimConfig& cfg, std::uint64_t seed) {
    if (g.n_directions() == 0) return true;
    const IncrementProvider prov{seed, 0, 1};
    return prov.increments(0, g.n_directions(), cfg.dt) ==
           prov.increments(0, g.n_directions(), cfg.dt);
}

/// Left-endpoint quadrature of a grid series up to (and excluding) index `end`.
double integrate_series(const std::vector<double>& t, const std::vector<double>& f,
                        std::size_t end) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < t.size() && i + 1 <= end; ++i)
        acc += f[i] * (t[i + 1] - t[i]);
    return acc;
}

}  // namespace

ExperimentResult continuity_experiment(const SimConfig& cfg, const FeedbackControl& phi,
                                       const NoiseModel& g, const CostSpec& spec,
                                       SequenceScheme scheme,
                                       const std::vector<int>& n_list, int n_paths,
                                       std::uint64_t seed) {
    if (n_list.empty()) throw std::invalid_argument("continuity: empty n_list");
    spec.validate();
    cfg.validate();

    ExperimentResult res;
    res.table.columns = {"n", "lv_distance", "j_n", "j_ref", "abs_dj", "ci_half",
                         "coupled_sup_diff"};
    res.table.add_meta("experiment", "continuity");
    res.table.add_meta("scheme", scheme_name(scheme));
    res.table.add_meta("n_paths", std::to_string(n_paths));
    res.table.add_meta("seed", std::to_string(seed));
    res.table.add_meta("crn_replay_ok", crn_replay_ok(g, cfg, seed) ? "1" : "0");

    std::vector<double> abs_dj, cis;
    for (int n : n_list) {
        const FeedbackControl phi_n = control_sequence(phi, n, scheme);
        const OperatorDistance d = lv_operator_distance(phi, phi_n);

        std::vector<double> c_ref(n_paths), c_n(n_paths), sup_diff(n_paths);
        parallel_for(n_paths, [&](std::size_t p) {
            const CoupledResult cr =
                simulate_coupled(cfg, {phi, phi_n}, g, seed, p, &spec);
            c_ref[p] = path_cost(cr.trajectories[0], spec);
            c_n[p] = path_cost(cr.trajectories[1], spec);
            // E sup_t |transformed cost difference| along the coupled pair
            const auto& a = cr.trajectories[0].cost_raw;
            const auto& b = cr.trajectories[1].cost_raw;
            double sd = 0.0;
            for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
                sd = std::max(sd, std::abs(concave_transform(a[i], spec.eps) -
                                           concave_transform(b[i], spec.eps)));
            sup_diff[p] = sd;
        });

        const MeanCi ref = mean_ci(c_ref);
        const MeanCi jn = mean_ci(c_n);
        const MeanCi sdm = mean_ci(sup_diff);
        const double dj = std::abs(jn.mean - ref.mean);
        const double ci = std::max(ref.ci, jn.ci);
        res.table.rows.push_back({double(n), d.linear + d.base, jn.mean, ref.mean,
                                  dj, ci, sdm.mean});
        abs_dj.push_back(dj);
        cis.push_back(ci);
    }
    check_trend(abs_dj, cis, "continuity |dJ|", res.failures);
    return res;
}

ExperimentResult solution_convergence_experiment(const SimConfig& cfg,
                                                 const FeedbackControl& phi,
                                                 const NoiseModel& g,
                                                 SequenceScheme scheme,
                                                 const std::vector<int>& n_list,
                                                 int n_paths, double delta,
                                                 std::uint64_t seed) {
    if (n_list.empty()) throw std::invalid_argument("convergence: empty n_list");
    cfg.validate();
    if (norm_v(cfg.u0) > cfg.stop_mtilde + 1e-12)
        throw std::invalid_argument("convergence: ||u0||_V must be <= stop_mtilde");

    ExperimentResult res;
    res.table.columns = {"n",        "lv_distance",       "int_diff_v2",
                         "sup_diff_conditioned", "cond_fraction", "prob_exceed_delta"};
    res.table.add_meta("experiment", "convergence");
    res.table.add_meta("scheme", scheme_name(scheme));
    res.table.add_meta("n_paths", std::to_string(n_paths));
    res.table.add_meta("delta", fmt(delta));
    res.table.add_meta("seed", std::to_string(seed));
    res.table.add_meta("crn_replay_ok", crn_replay_ok(g, cfg, seed) ? "1" : "0");

    std::vector<double> col_i, col_i_ci, col_iii, col_iii_ci;
    for (int n : n_list) {
        const FeedbackControl phi_n = control_sequence(phi, n, scheme);
        const OperatorDistance d = lv_operator_distance(phi, phi_n);

        std::vector<double> int_diff(n_paths), sup_diff(n_paths);
        std::vector<char> inside(n_paths), exceed(n_paths);
        parallel_for(n_paths, [&](std::size_t p) {
            const CoupledResult cr =
                simulate_coupled(cfg, {phi, phi_n}, g, seed, p, nullptr);
            const auto& t0 = cr.trajectories[0];
            const auto& t1 = cr.trajectories[1];
            const std::size_t m = cr.diff_vnorm2.size();
            const std::vector<double> grid(t0.times.begin(), t0.times.begin() + std::min(m, t0.times.size()));
            int_diff[p] = integrate_series(grid, cr.diff_vnorm2, m);
            double sup = 0.0;
            for (double v : cr.diff_vnorm2) sup = std::max(sup, v);
            inside[p] = (!t0.truncated() && !t1.truncated()) ? 1 : 0;
            sup_diff[p] = sup + (cr.diff_anorm2_int.empty() ? 0.0 : cr.diff_anorm2_int.back());
            exceed[p] = sup > delta ? 1 : 0;
        });

        const MeanCi mi = mean_ci(int_diff);
        std::vector<double> cond;
        int n_inside = 0, n_exceed = 0;
        for (int p = 0; p < n_paths; ++p) {
            if (inside[p]) {
                cond.push_back(sup_diff[p]);
                ++n_inside;
            }
            n_exceed += exceed[p];
        }
        const MeanCi mc = mean_ci(cond);
        const double prob = double(n_exceed) / n_paths;
        res.table.rows.push_back({double(n), d.linear + d.base, mi.mean, mc.mean,
                                  double(n_inside) / n_paths, prob});
        col_i.push_back(mi.mean);
        col_i_ci.push_back(mi.ci);
        col_iii.push_back(prob);
        col_iii_ci.push_back(binom_ci(prob, n_paths));
    }
    check_trend(col_i, col_i_ci, "convergence int ||u-u_n||_V^2", res.failures);
    check_trend(col_iii, col_iii_ci, "convergence P(sup > delta)", res.failures);
    return res;
}

ExperimentResult tail_experiment(const SimConfig& cfg, const FeedbackControl& phi,
                                 const NoiseModel& g, const std::vector<double>& s_list,
                                 int n_paths, std::uint64_t seed) {
    cfg.validate();
    for (double s : s_list)
        if (s > cfg.t_final + 1e-12)
            throw std::invalid_argument("tail: S exceeds the horizon T");

    const double threshold = cfg.stop_mtilde * cfg.stop_mtilde +
                             (cfg.stop_m - 1.0) * (cfg.stop_m - 1.0);

    ExperimentResult res;
    res.table.columns = {"s", "prob", "ci_half"};
    res.table.add_meta("experiment", "tail");
    res.table.add_meta("n_paths", std::to_string(n_paths));
    res.table.add_meta("threshold", fmt(threshold));
    res.table.add_meta("seed", std::to_string(seed));

    // one simulation per path; the S sweep reuses the stored diagnostics
    std::vector<Trajectory> trajs(n_paths);
    parallel_for(n_paths, [&](std::size_t p) {
        trajs[p] = simulate_path(cfg, phi, g, seed, p, nullptr);
    });

    std::vector<double> probs, cis;
    for (double s : s_list) {
        int count = 0;
        for (const auto& tr : trajs) {
            double q = 0.0, runmax = 0.0;
            for (std::size_t i = 0; i < tr.times.size() && tr.times[i] <= s + 1e-12; ++i) {
                runmax = std::max(runmax, tr.vnorm2[i]);
                q = runmax + tr.anorm2_int[i];
            }
            if (q > threshold) ++count;
        }
        const double p = double(count) / n_paths;
        probs.push_back(p);
        cis.push_back(binom_ci(p, n_paths));
        res.table.rows.push_back({s, p, cis.back()});
    }
    // rows are ordered by decreasing S, so the trend reads left to right
    check_trend(probs, cis, "tail probability", res.failures);
    return res;
}

ExperimentResult log_moment_experiment(const SimConfig& cfg, const FeedbackControl& phi,
                                       const NoiseModel& g,
                                       const std::vector<double>& dt_list,
                                       const std::vector<double>& t_list, int n_paths,
                                       std::uint64_t seed) {
    if (dt_list.empty() || t_list.empty())
        throw std::invalid_argument("logmoment: empty parameter lists");

    double dt_base = dt_list.front();
    for (double dt : dt_list) dt_base = std::min(dt_base, dt);

    ExperimentResult res;
    res.table.columns = {"dt", "t_final", "value", "ci_half"};
    res.table.add_meta("experiment", "logmoment");
    res.table.add_meta("n_paths", std::to_string(n_paths));
    res.table.add_meta("seed", std::to_string(seed));

    for (double tf : t_list) {
        std::vector<double> values;
        for (double dt : dt_list) {
            const int substeps = static_cast<int>(std::lround(dt / dt_base));
            if (std::abs(substeps * dt_base - dt) > 1e-9 * dt)
                throw std::invalid_argument("logmoment: dt_list entries must be "
                                            "integer multiples of the smallest dt");
            SimConfig c = cfg;
            c.dt = dt;
            c.t_final = tf;
            std::vector<double> sup_log(n_paths);
            parallel_for(n_paths, [&](std::size_t p) {
                const Trajectory tr =
                    simulate_path(c, phi, g, seed, p, nullptr, substeps);
                double m = 0.0;
                for (double v2 : tr.vnorm2) m = std::max(m, std::log1p(v2));
                sup_log[p] = m;
            });
            const MeanCi mc = mean_ci(sup_log);
            res.table.rows.push_back({dt, tf, mc.mean, mc.ci});
            if (!std::isfinite(mc.mean))
                res.failures.push_back("logmoment: non-finite value at dt=" + fmt(dt));
            values.push_back(mc.mean);
        }
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            const double rel = std::abs(values[i + 1] - values[i]) /
                               std::max(1e-300, std::abs(values[i]));
            if (rel > 0.05)
                res.failures.push_back("logmoment: dt-instability " + fmt(rel) +
                                       " at T=" + fmt(tf));
        }
    }
    return res;
}

SubadditivityReport subadditivity_check(double eps, long long n_samples,
                                        std::uint64_t seed) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("subadditivity_check: eps must be in (0,1)");
    SubadditivityReport rep;
    rep.samples = n_samples;
    rep.max_slack = -1e308;
    for (long long i = 0; i < n_samples; ++i) {
        // log-uniform over [1e-12, 1e6]
        const double u1 = rng::uniform(seed, 1, static_cast<std::uint64_t>(i), 0);
        const double u2 = rng::uniform(seed, 1, static_cast<std::uint64_t>(i), 1);
        const double x1 = std::pow(10.0, -12.0 + 18.0 * u1);
        const double x2 = std::pow(10.0, -12.0 + 18.0 * u2);
        const double lhs = std::abs(concave_transform(x1, eps) - concave_transform(x2, eps));
        const double rhs = concave_transform(std::abs(x1 - x2), eps);
        const double slack = lhs - rhs;
        rep.max_slack = std::max(rep.max_slack, slack);
        if (slack > 1e-12) ++rep.violations;
    }
    return rep;
}

namespace {

void validate_gronwall(const GronwallInstance& g) {
    const std::size_t n = g.t.size();
    if (n < 2) throw std::invalid_argument("gronwall: grid needs >= 2 points");
    if (g.x.size() != n || g.y.size() != n || g.z.size() != n || g.r.size() != n)
        throw std::invalid_argument("gronwall: sequence length mismatch");
    if (!(g.c0 >= 1.0)) throw std::invalid_argument("gronwall: c0 must be >= 1");
    for (std::size_t i = 0; i < n; ++i) {
        if (g.x[i] < 0 || g.y[i] < 0 || g.z[i] < 0 || g.r[i] < 0)
            throw std::invalid_argument("gronwall: sequences must be nonnegative");
        if (i + 1 < n && !(g.t[i + 1] > g.t[i]))
            throw std::invalid_argument("gronwall: grid not increasing");
    }
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) mass += g.r[i] * (g.t[i + 1] - g.t[i]);
    if (!(mass < g.kappa))
        throw std::invalid_argument("gronwall: total r-mass must be < kappa");

    // discrete local inequality on every subinterval [a,b]
    for (std::size_t a = 0; a + 1 < n; ++a) {
        double xmax = g.x[a], ysum = 0.0, rxz = 0.0;
        for (std::size_t b = a + 1; b < n; ++b) {
            const double dt = g.t[b] - g.t[b - 1];
            ysum += g.y[b - 1] * dt;
            rxz += (g.r[b - 1] * g.x[b - 1] + g.z[b - 1]) * dt;
            xmax = std::max(xmax, g.x[b]);
            const double lhs = xmax + ysum;
            const double rhs = g.c0 * (g.x[a] + rxz);
            if (lhs > rhs * (1.0 + 1e-9) + 1e-12)
                throw std::invalid_argument("gronwall: local inequality violated on [" +
                                            fmt(g.t[a]) + "," + fmt(g.t[b]) + "]");
        }
    }
}

}  // namespace

GronwallVerdict gronwall_check(const GronwallInstance& g) {
    validate_gronwall(g);
    const std::size_t n = g.t.size();
    const double cap = 1.0 / (2.0 * g.c0);

    // greedy partition: maximal blocks with r-mass <= 1/(2 c0)
    std::vector<double> block_mass;
    double mass = 0.0;
    std::size_t block_len = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double m = g.r[i] * (g.t[i + 1] - g.t[i]);
        if (m > cap)
            throw std::invalid_argument("gronwall: grid too coarse for the partition");
        if (mass + m > cap && block_len > 0) {
            block_mass.push_back(mass);
            mass = 0.0;
            block_len = 0;
        }
        mass += m;
        ++block_len;
    }
    if (block_len > 0) block_mass.push_back(mass);

    // block induction: per-block factor F = c0 / (1 - c0 * mass) <= 2 c0
    double c_eff = 0.0;
    for (std::size_t k = 0; k < block_mass.size(); ++k) {
        const double f = g.c0 / (1.0 - g.c0 * block_mass[k]);
        c_eff = (k == 0) ? f : c_eff * (1.0 + f) + f;
    }

    double xmax = 0.0, ysum = 0.0, zsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) xmax = std::max(xmax, g.x[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dt = g.t[i + 1] - g.t[i];
        ysum += g.y[i] * dt;
        zsum += g.z[i] * dt;
    }
    const double lhs = xmax + ysum;
    const double rhs = c_eff * (g.x[0] + zsum);
    GronwallVerdict v;
    v.c_effective = c_eff;
    v.n_blocks = static_cast<int>(block_mass.size());
    v.holds = lhs <= rhs * (1.0 + 1e-12) + 1e-300;
    return v;
}

GronwallInstance make_gronwall_instance(std::uint64_t seed, std::uint64_t index) {
    auto u = [&](std::uint64_t j) { return rng::uniform(seed, index, j, 2); };
    GronwallInstance g;
    const int steps = 20 + static_cast<int>(u(0) * 100);
    const double tfin = 0.5 + 1.5 * u(1);
    g.c0 = 1.0 + 2.0 * u(2);
    for (int i = 0; i <= steps; ++i) g.t.push_back(tfin * i / steps);

    const double dt = tfin / steps;
    const double cap = 1.0 / (2.0 * g.c0);
    // keep each step's mass safely below the block cap
    const double rmax = 0.8 * cap / dt;
    double mass = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double ri = rmax * u(10 + 3 * std::uint64_t(i));
        g.r.push_back(ri);
        if (i < steps) mass += ri * dt;
    }
    g.kappa = mass * (1.01 + u(3));

    const double x0 = (u(4) < 0.2) ? 0.0 : u(5) * 5.0;
    const double theta = 0.6 * std::min(1.0, g.c0);
    const double gamma = 0.3 * std::min(1.0, g.c0);
    g.x.push_back(x0);
    for (int i = 0; i <= steps; ++i) {
        const double zi = (u(6) < 0.3 && x0 > 0) ? 0.0 : u(11 + 3 * std::uint64_t(i)) * 2.0;
        g.z.push_back(zi);
        const double drive = g.r[i] * g.x[i] + zi;
        g.y.push_back(gamma * drive);
        if (i < steps) g.x.push_back(g.x[i] + theta * drive * dt);
    }
    return g;
}

GronwallInstance gronwall_hand_instance() {
    GronwallInstance g;
    g.c0 = 1.0;
    g.kappa = 1.01;
    const int steps = 100;
    for (int i = 0; i <= steps; ++i) g.t.push_back(double(i) / steps);
    for (int i = 0; i <= steps; ++i) {
        g.r.push_back(1.0);
        g.z.push_back(1.0);
        g.y.push_back(0.0);
    }
    // saturating recursion x' = x + (r x + z) dt with c0 = 1
    g.x.push_back(1.0);
    for (int i = 0; i < steps; ++i)
        g.x.push_back(g.x[i] + (g.r[i] * g.x[i] + g.z[i]) * (g.t[i + 1] - g.t[i]));
    return g;
}

}  // namespace snse
