#pragma once

#include <optional>
#include <string>
#include <vector>

#include "snse/cost.hpp"
#include "snse/integrator.hpp"
#include "snse/optimize.hpp"
#include "snse/verify.hpp"

namespace snse {

/// Fully validated run configuration. Parsed from a strict line-oriented
/// `section.key = value` file; unknown keys are fatal.
struct RunSpec {
    SimConfig sim;
    NoiseModel noise;
    std::optional<FeedbackControl> control;  ///< absent = null control
    std::optional<CostSpec> cost;
    int mc_paths = 0;
    std::uint64_t mc_seed = 0;
    std::string label = "run";

    // experiment blocks (each subcommand checks for the ones it needs)
    std::vector<int> n_list;
    std::optional<SequenceScheme> scheme;
    std::vector<double> s_list, dt_list, t_list;
    double delta = 0.01;
    long long samples = 1000000;
    int instances = 100;
    int budget = 0;
    std::vector<double> opt_lower, opt_upper;
    std::vector<ParamSlot> opt_slots;

    /// key = value lines echoed into every output header
    std::vector<std::pair<std::string, std::string>> echo;

    FeedbackControl effective_control() const {
        return control ? *control : FeedbackControl::null(sim.t_final);
    }
};

RunSpec parse_config(const std::string& path);

}  // namespace snse
