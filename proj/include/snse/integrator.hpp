#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "snse/bilinear.hpp"
#include "snse/control.hpp"
#include "snse/cost.hpp"
#include "snse/noise.hpp"
#include "snse/rng.hpp"

namespace snse {

/// Simulation parameters for the controlled Galerkin SNSE.
struct SimConfig {
    int trunc_n = 2;
    double nu = 1.0;
    double dt = 1e-3;
    double t_final = 1.0;
    double stop_m = 1e6;       ///< M in the stopping radius M + Mtilde
    double stop_mtilde = 1.0;  ///< Mtilde, also the bound on ||u0||_V
    SpectralField u0{2};
    bool nonlinear = true;  ///< B term on/off (off for linear-SPDE oracles)

    void validate() const;
    std::size_t n_steps() const;
    double step_dt(std::size_t step) const;  // last step shortened to land on T
};

/// One simulated path: grid diagnostics, cost samples, exit bookkeeping.
/// Truncated early (arrays shorter than the full grid) on numerical blow-up
/// or on exceeding the stopping radius.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> vnorm2;      ///< ||u(t)||_V^2 per grid time
    std::vector<double> anorm2_int;  ///< running int_0^t ||Au||_H^2 ds (left endpoint)
    std::vector<double> cost_raw;    ///< L(t, u(t), phi(t,u(t))) per grid time
    std::optional<std::size_t> exit_index;
    bool blew_up = false;  ///< NaN/inf amplitude encountered
    int cap_events = 0;
    int stability_warnings = 0;  ///< dt * N^2 * ||u||_V > 1 seen (explicit B term)
    SpectralField final_state{2};

    bool truncated() const { return exit_index.has_value() || blew_up; }
    double running_max_vnorm2(std::size_t upto) const;
    double sup_vnorm2() const { return running_max_vnorm2(vnorm2.size() - 1); }
};

/// One semi-implicit Euler-Maruyama step: implicit (exact, mode-diagonal) in
/// the Stokes term, explicit in B, phi and the noise increment. Throws
/// std::runtime_error on a non-finite amplitude.
SpectralField step(const SpectralField& u, double t, double dt, const SimConfig& cfg,
                   const FeedbackControl& phi, const NoiseModel& g,
                   const std::vector<double>& dw, int* cap_events = nullptr);

/// Spec-level step with dt taken from the config.
inline SpectralField step(const SpectralField& u, double t, const SimConfig& cfg,
                          const FeedbackControl& phi, const NoiseModel& g,
                          const std::vector<double>& dw) {
    return step(u, t, cfg.dt, cfg, phi, g, dw);
}

/// Brownian increments for a path, sampled at a base resolution of
/// `substeps` per integrator step so that coarse/fine runs sharing a seed are
/// CRN-coupled (the coarse increment is the sum of the fine ones).
struct IncrementProvider {
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
    int substeps = 1;

    std::vector<double> increments(std::size_t step_index, std::size_t n_dirs,
                                   double dt) const;
};

Trajectory simulate_path(const SimConfig& cfg, const FeedbackControl& phi,
                         const NoiseModel& g, std::uint64_t seed,
                         std::uint64_t path_index,
                         const CostSpec* cost = nullptr, int substeps = 1);

/// Coupled trajectories: every control consumes the identical increment
/// stream. diff_* hold the Eq.-style difference diagnostics for the first
/// pair of controls.
struct CoupledResult {
    std::vector<Trajectory> trajectories;
    std::vector<double> diff_vnorm2;      ///< ||u_0(t) - u_1(t)||_V^2
    std::vector<double> diff_anorm2_int;  ///< running int ||A(u_0-u_1)||_H^2 ds
};

CoupledResult simulate_coupled(const SimConfig& cfg,
                               const std::vector<FeedbackControl>& phis,
                               const NoiseModel& g, std::uint64_t seed,
                               std::uint64_t path_index,
                               const CostSpec* cost = nullptr, int substeps = 1);

/// First grid time where (running-max ||u||_V^2 + int ||Au||^2)^{1/2}
/// exceeds m + mtilde; nullopt if never before T.
std::optional<double> exit_time(const Trajectory& traj, double m, double mtilde);

}  // namespace snse
