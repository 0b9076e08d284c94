#include "snse/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "snse/parallel.hpp"

namespace snse {

double path_cost(const Trajectory& traj, const CostSpec& spec) {
    spec.validate();
    if (traj.cost_raw.empty()) throw std::invalid_argument("path_cost: empty trajectory");
    double m = 0.0;
    for (double c : traj.cost_raw)
        m = std::max(m, concave_transform(c, spec.eps));
    return m;
}

JEstimate estimate_j(const SimConfig& cfg, const FeedbackControl& phi,
                     const NoiseModel& g, const CostSpec& spec, int n_paths,
                     std::uint64_t seed) {
    if (n_paths < 2) throw std::invalid_argument("estimate_j: n_paths must be >= 2");
    std::vector<double> costs(n_paths, 0.0);
    std::vector<char> truncated(n_paths, 0);
    parallel_for(n_paths, [&](std::size_t p) {
        const Trajectory tr = simulate_path(cfg, phi, g, seed, p, &spec);
        costs[p] = path_cost(tr, spec);
        truncated[p] = tr.truncated() ? 1 : 0;
    });
    JEstimate e;
    for (int p = 0; p < n_paths; ++p) {
        e.mean += costs[p];
        e.blowups += truncated[p];
    }
    e.mean /= n_paths;
    double ss = 0.0;
    for (int p = 0; p < n_paths; ++p) ss += (costs[p] - e.mean) * (costs[p] - e.mean);
    const double sd = std::sqrt(ss / (n_paths - 1));
    e.ci_half = 1.96 * sd / std::sqrt(static_cast<double>(n_paths));
    return e;
}

}  // namespace snse
