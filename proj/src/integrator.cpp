#include "snse/integrator.hpp"

#include <cmath>
#include <stdexcept>

namespace snse {

void SimConfig::validate() const {
    if (trunc_n < 1) throw std::invalid_argument("sim.trunc_n must be >= 1");
    if (!(nu > 0.0)) throw std::invalid_argument("sim.nu must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("sim.dt must be > 0");
    if (!(t_final > 0.0)) throw std::invalid_argument("sim.t_final must be > 0");
    if (dt > t_final + 1e-12) throw std::invalid_argument("sim.dt must be <= t_final");
    if (!(stop_m > 1.0)) throw std::invalid_argument("sim.stop_m must be > 1");
    if (!(stop_mtilde > 0.0)) throw std::invalid_argument("sim.stop_mtilde must be > 0");
    if (u0.trunc() != trunc_n)
        throw std::invalid_argument("u0 truncation does not match sim.trunc_n");
}

std::size_t SimConfig::n_steps() const {
    return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

double SimConfig::step_dt(std::size_t s) const {
    const double remaining = t_final - static_cast<double>(s) * dt;
    return std::min(dt, remaining);
}

double Trajectory::running_max_vnorm2(std::size_t upto) const {
    double m = 0.0;
    for (std::size_t i = 0; i <= upto && i < vnorm2.size(); ++i)
        m = std::max(m, vnorm2[i]);
    return m;
}

namespace {

SpectralField step_impl(const SpectralField& u, double dt, const SimConfig& cfg,
                        const SpectralField& phi_field, const NoiseModel& g,
                        const std::vector<double>& dw) {
    SpectralField drift = phi_field;
    if (cfg.nonlinear) drift -= nonlinear_b(u, u);
    const SpectralField noise = diffusion_apply(g, 0.0, u, dw);
    SpectralField out(u.trunc());
    u.for_each([&](Mode k, cplx a) {
        const cplx num = a + dt * drift.at(k) + noise.at(k);
        out.set(k, num / (1.0 + cfg.nu * mode_lambda(k) * dt));
    });
    return out;
}

}  // namespace

SpectralField step(const SpectralField& u, double t, double dt, const SimConfig& cfg,
                   const FeedbackControl& phi, const NoiseModel& g,
                   const std::vector<double>& dw, int* cap_events) {
    const ControlEval pe = eval_control(phi, t, u);
    if (cap_events && pe.capped) ++(*cap_events);
    SpectralField out = step_impl(u, dt, cfg, pe.field, g, dw);
    if (!out.finite()) throw std::runtime_error("step: non-finite amplitude (blow-up)");
    return out;
}

std::vector<double> IncrementProvider::increments(std::size_t step_index,
                                                  std::size_t n_dirs,
                                                  double dt) const {
    if (!(dt > 0.0)) throw std::invalid_argument("increments: dt must be > 0");
    if (substeps <= 1) return sample_increments(seed, path_index, step_index, n_dirs, dt);
    std::vector<double> out(n_dirs, 0.0);
    const double s = std::sqrt(dt / substeps);
    for (int sub = 0; sub < substeps; ++sub) {
        const std::uint64_t base = step_index * static_cast<std::uint64_t>(substeps) + sub;
        for (std::size_t d = 0; d < n_dirs; ++d)
            out[d] += s * rng::gaussian(seed, path_index, base, d);
    }
    return out;
}

Trajectory simulate_path(const SimConfig& cfg, const FeedbackControl& phi,
                         const NoiseModel& g, std::uint64_t seed,
                         std::uint64_t path_index, const CostSpec* cost,
                         int substeps) {
    CoupledResult r = simulate_coupled(cfg, {phi}, g, seed, path_index, cost, substeps);
    return std::move(r.trajectories.front());
}

CoupledResult simulate_coupled(const SimConfig& cfg,
                               const std::vector<FeedbackControl>& phis,
                               const NoiseModel& g, std::uint64_t seed,
                               std::uint64_t path_index, const CostSpec* cost,
                               int substeps) {
    cfg.validate();
    if (phis.empty()) throw std::invalid_argument("simulate_coupled: empty control list");

    const std::size_t n_ctl = phis.size();
    const std::size_t steps = cfg.n_steps();
    const double radius2 = (cfg.stop_m + cfg.stop_mtilde) * (cfg.stop_m + cfg.stop_mtilde);

    CoupledResult res;
    res.trajectories.resize(n_ctl, Trajectory{});
    std::vector<SpectralField> state(n_ctl, cfg.u0);
    std::vector<double> anorm_running(n_ctl, 0.0);
    std::vector<double> runmax(n_ctl, 0.0);
    std::vector<bool> active(n_ctl, true);

    const IncrementProvider prov{seed, path_index, substeps};

    auto record = [&](std::size_t c, double t) {
        Trajectory& tr = res.trajectories[c];
        const ControlEval pe = eval_control(phis[c], t, state[c]);
        if (pe.capped) ++tr.cap_events;
        const SobolevNorms nrm = sobolev_norms(state[c]);
        tr.times.push_back(t);
        tr.vnorm2.push_back(nrm.v * nrm.v);
        tr.anorm2_int.push_back(anorm_running[c]);
        tr.cost_raw.push_back(cost ? running_cost(*cost, t, state[c], pe.field) : 0.0);
        runmax[c] = std::max(runmax[c], nrm.v * nrm.v);
        if (!tr.exit_index && runmax[c] + anorm_running[c] > radius2) {
            tr.exit_index = tr.times.size() - 1;
            active[c] = false;
        }
        if (cfg.nonlinear &&
            cfg.dt * cfg.trunc_n * cfg.trunc_n * nrm.v > 1.0)
            ++tr.stability_warnings;  // explicit B term outside its stable range
        return nrm;
    };

    // t = 0 samples
    for (std::size_t c = 0; c < n_ctl; ++c) record(c, 0.0);
    if (n_ctl >= 2) {
        const SobolevNorms n = sobolev_norms(state[0] - state[1]);
        res.diff_vnorm2.push_back(n.v * n.v);
        res.diff_anorm2_int.push_back(0.0);
    }

    double diff_anorm_running = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) * cfg.dt;
        const double h = cfg.step_dt(s);
        std::vector<double> dw;
        if (g.n_directions() > 0) dw = prov.increments(s, g.n_directions(), h);

        const bool pair_active = n_ctl >= 2 && active[0] && active[1];
        if (pair_active) {
            const SobolevNorms n = sobolev_norms(state[0] - state[1]);
            diff_anorm_running += n.a * n.a * h;
        }

        for (std::size_t c = 0; c < n_ctl; ++c) {
            if (!active[c]) continue;
            Trajectory& tr = res.trajectories[c];
            const ControlEval pe = eval_control(phis[c], t, state[c]);
            anorm_running[c] += sobolev_norms(state[c]).a * sobolev_norms(state[c]).a * h;
            SpectralField next = step_impl(state[c], h, cfg, pe.field, g, dw);
            if (!next.finite()) {
                tr.blew_up = true;
                tr.exit_index = tr.times.size() - 1;
                active[c] = false;
                continue;
            }
            state[c] = std::move(next);
            record(c, t + h);
        }

        if (pair_active && active[0] && active[1]) {
            const SobolevNorms n = sobolev_norms(state[0] - state[1]);
            res.diff_vnorm2.push_back(n.v * n.v);
            res.diff_anorm2_int.push_back(diff_anorm_running);
        }
    }

    for (std::size_t c = 0; c < n_ctl; ++c)
        res.trajectories[c].final_state = state[c];
    return res;
}

std::optional<double> exit_time(const Trajectory& traj, double m, double mtilde) {
    const double r2 = (m + mtilde) * (m + mtilde);
    double runmax = 0.0;
    for (std::size_t i = 0; i < traj.vnorm2.size(); ++i) {
        runmax = std::max(runmax, traj.vnorm2[i]);
        if (runmax + traj.anorm2_int[i] > r2) return traj.times[i];
    }
    return std::nullopt;
}

}  // namespace snse
