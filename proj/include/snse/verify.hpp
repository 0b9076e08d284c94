#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "snse/estimator.hpp"

namespace snse {

/// Tabular experiment output: '#'-prefixed key=value metadata plus rows.
struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_meta(const std::string& k, const std::string& v) {
        meta.emplace_back(k, v);
    }
};

/// Experiment outcome: the emitted table plus any failed assertions
/// (trend violations, stability breaches). Empty failures means pass.
struct ExperimentResult {
    Table table;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

/// Cost-functional continuity (J(phi_n) -> J(phi)) along a control sequence,
/// with common random numbers. Columns:
///   n, lv_distance, j_n, j_ref, abs_dj, ci_half, coupled_sup_diff
ExperimentResult continuity_experiment(const SimConfig& cfg, const FeedbackControl& phi,
                                       const NoiseModel& g, const CostSpec& spec,
                                       SequenceScheme scheme,
                                       const std::vector<int>& n_list, int n_paths,
                                       std::uint64_t seed);

/// Solution convergence under control perturbation. Columns:
///   n, lv_distance, int_diff_v2, sup_diff_conditioned, cond_fraction,
///   prob_exceed_delta
ExperimentResult solution_convergence_experiment(const SimConfig& cfg,
                                                 const FeedbackControl& phi,
                                                 const NoiseModel& g,
                                                 SequenceScheme scheme,
                                                 const std::vector<int>& n_list,
                                                 int n_paths, double delta,
                                                 std::uint64_t seed);

/// Small-time tail probabilities of the energy radius. Columns:
///   s, prob, ci_half
ExperimentResult tail_experiment(const SimConfig& cfg, const FeedbackControl& phi,
                                 const NoiseModel& g, const std::vector<double>& s_list,
                                 int n_paths, std::uint64_t seed);

/// Log-moment bound: E sup log(1+||u||_V^2) finite and dt-stable. Columns:
///   dt, t_final, value, ci_half
ExperimentResult log_moment_experiment(const SimConfig& cfg, const FeedbackControl& phi,
                                       const NoiseModel& g,
                                       const std::vector<double>& dt_list,
                                       const std::vector<double>& t_list, int n_paths,
                                       std::uint64_t seed);

struct SubadditivityReport {
    long long samples = 0;
    long long violations = 0;
    double max_slack = 0.0;  ///< max of |phi(x1)-phi(x2)| - phi(|x1-x2|)
};

/// Randomized sweep of |phi(x1)-phi(x2)| <= phi(|x1-x2|) on log-uniform pairs.
SubadditivityReport subadditivity_check(double eps, long long n_samples,
                                        std::uint64_t seed);

/// Discrete realization of the stochastic-Gronwall data: grid sequences
/// X, Y, Z, R with the local inequality
///   max_{[a,b]} x + sum_{[a,b)} y dt <= c0 (x(a) + sum_{[a,b)} (r x + z) dt)
/// holding on every subinterval, and sum r dt < kappa.
struct GronwallInstance {
    std::vector<double> t;
    std::vector<double> x, y, z, r;
    double c0 = 1.0;
    double kappa = 1.0;
};

struct GronwallVerdict {
    double c_effective = 0.0;
    bool holds = false;
    int n_blocks = 0;
};

/// Verifies the instance preconditions (throws on violation), builds the
/// greedy stopping-time partition with per-block r-mass <= 1/(2 c0), runs the
/// block induction to an explicit constant, and checks the global conclusion
///   max x + sum y dt <= C (x(0) + sum z dt).
GronwallVerdict gronwall_check(const GronwallInstance& inst);

/// Randomized valid instance: x built from a recursion that enforces the
/// local inequality by construction.
GronwallInstance make_gronwall_instance(std::uint64_t seed, std::uint64_t index);

/// The two-block hand instance (r = 1, T = 1, c0 = 1, kappa = 1.01); its
/// induction constant is 8 by direct computation.
GronwallInstance gronwall_hand_instance();

}  // namespace snse
