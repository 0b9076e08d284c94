#pragma once

#include <string>
#include <vector>

#include "snse/estimator.hpp"

namespace snse {

/// What one optimization coordinate controls: a constant-in-time gain or a
/// constant-in-time real base forcing amplitude on one mode.
struct ParamSlot {
    enum class Kind { Gain, Base };
    Mode k;
    Kind kind = Kind::Gain;
};

/// Compact box Theta in R^d with a coordinate-affine embedding into the
/// admissible control class (cap and Lipschitz constants independent of
/// theta, so the embedded family stays in a fixed ball of U).
struct ParamBox {
    std::vector<double> lower, upper;
    std::vector<ParamSlot> slots;
    double horizon = 1.0;
    double cap_k = 1.0;
    double state_radius = 1.0;

    std::size_t dims() const { return slots.size(); }
    void validate() const;
    bool contains(const std::vector<double>& theta) const;
    FeedbackControl embed(const std::vector<double>& theta) const;
};

/// Sample-average objective J_hat(embed(theta)) with the seed fixed across
/// all theta (CRN), so the surrogate is a deterministic function of theta.
double saa_objective(const std::vector<double>& theta, const ParamBox& box,
                     const SimConfig& cfg, const NoiseModel& g, const CostSpec& spec,
                     int n_paths, std::uint64_t seed);

struct TraceEntry {
    std::vector<double> theta;
    double objective = 0.0;
    std::string phase;  // "grid" or "simplex"
};

struct MinimizeResult {
    std::vector<double> theta_star;
    double j_star = 0.0;
    int evals = 0;
    std::vector<TraceEntry> trace;
};

/// Coarse low-discrepancy lattice scan (ceil(budget/3) points) followed by
/// Nelder-Mead refinement from the best grid point, clamped to the box.
MinimizeResult minimize(const ParamBox& box, const SimConfig& cfg, const NoiseModel& g,
                        const CostSpec& spec, int n_paths, std::uint64_t seed,
                        int budget);

}  // namespace snse
