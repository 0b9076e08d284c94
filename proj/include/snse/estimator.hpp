#pragma once

#include "snse/integrator.hpp"

namespace snse {

/// Pathwise cost: max over grid times of the transformed running cost. The
/// transform is increasing, so this equals the transform of the max; the
/// implementation computes sup-outside and the tests assert the identity.
double path_cost(const Trajectory& traj, const CostSpec& spec);

struct JEstimate {
    double mean = 0.0;
    double ci_half = 0.0;  ///< 1.96 * stddev / sqrt(n_paths)
    int blowups = 0;       ///< paths truncated before T (radius exit or NaN)
};

/// Monte Carlo estimate of J over path indices 0..n_paths-1; deterministic
/// given the seed and independent of the worker count.
JEstimate estimate_j(const SimConfig& cfg, const FeedbackControl& phi,
                     const NoiseModel& g, const CostSpec& spec, int n_paths,
                     std::uint64_t seed);

}  // namespace snse
