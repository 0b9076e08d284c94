#include "snse/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snse {

void ParamBox::validate() const {
    if (slots.empty()) throw std::invalid_argument("param box: no slots");
    if (lower.size() != slots.size() || upper.size() != slots.size())
        throw std::invalid_argument("param box: bound length mismatch");
    for (std::size_t i = 0; i < slots.size(); ++i)
        if (lower[i] > upper[i])
            throw std::invalid_argument("param box: lower > upper");
}

bool ParamBox::contains(const std::vector<double>& theta) const {
    if (theta.size() != slots.size()) return false;
    for (std::size_t i = 0; i < theta.size(); ++i)
        if (theta[i] < lower[i] - 1e-12 || theta[i] > upper[i] + 1e-12) return false;
    return true;
}

FeedbackControl ParamBox::embed(const std::vector<double>& theta) const {
    validate();
    if (theta.size() != slots.size())
        throw std::invalid_argument("embed: theta dimension mismatch");
    std::vector<ControlEntry> entries;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        ControlEntry e;
        e.k = slots[i].k;
        if (slots[i].kind == ParamSlot::Kind::Gain) {
            e.gain = TimeProfile<double>::constant(horizon, theta[i]);
            e.base = TimeProfile<cplx>::constant(horizon, cplx{0.0, 0.0});
        } else {
            e.gain = TimeProfile<double>::constant(horizon, 0.0);
            e.base = TimeProfile<cplx>::constant(horizon, cplx{theta[i], 0.0});
        }
        // merge duplicate modes additively? keep one entry per slot; modes may repeat
        entries.push_back(std::move(e));
    }
    return FeedbackControl(horizon, cap_k, state_radius, std::move(entries));
}

double saa_objective(const std::vector<double>& theta, const ParamBox& box,
                     const SimConfig& cfg, const NoiseModel& g, const CostSpec& spec,
                     int n_paths, std::uint64_t seed) {
    if (!box.contains(theta))
        throw std::invalid_argument("saa_objective: theta outside the box");
    return estimate_j(cfg, box.embed(theta), g, spec, n_paths, seed).mean;
}

namespace {

std::vector<double> clamp_to_box(std::vector<double> theta, const ParamBox& box) {
    for (std::size_t i = 0; i < theta.size(); ++i)
        theta[i] = std::clamp(theta[i], box.lower[i], box.upper[i]);
    return theta;
}

/// Kronecker lattice point i of m in [0,1]^d (golden-ratio family).
std::vector<double> lattice_point(std::size_t i, std::size_t m, std::size_t d) {
    static const double alphas[] = {0.6180339887498949, 0.7548776662466927,
                                    0.8191725133961645, 0.8566748838545029,
                                    0.8812714616335695, 0.8986537126286993};
    std::vector<double> p(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double a = alphas[j % 6];
        if (d == 1) {
            p[j] = (m <= 1) ? 0.5 : double(i) / double(m - 1);  // endpoints included
        } else {
            p[j] = std::fmod(0.5 + (i + 1) * a, 1.0);
        }
    }
    return p;
}

}  // namespace

MinimizeResult minimize(const ParamBox& box, const SimConfig& cfg, const NoiseModel& g,
                        const CostSpec& spec, int n_paths, std::uint64_t seed,
                        int budget) {
    box.validate();
    const std::size_t d = box.dims();
    if (budget < static_cast<int>((d + 1) * 3))
        throw std::invalid_argument("minimize: budget must be >= 3 (d+1)");

    MinimizeResult res;
    auto eval = [&](const std::vector<double>& theta, const char* phase) {
        const double j = saa_objective(theta, box, cfg, g, spec, n_paths, seed);
        res.trace.push_back({theta, j, phase});
        ++res.evals;
        if (res.theta_star.empty() || j < res.j_star) {
            res.theta_star = theta;
            res.j_star = j;
        }
        return j;
    };

    // stage 1: lattice scan
    const std::size_t grid_points = static_cast<std::size_t>((budget + 2) / 3);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const auto u = lattice_point(i, grid_points, d);
        std::vector<double> theta(d);
        for (std::size_t j = 0; j < d; ++j)
            theta[j] = box.lower[j] + u[j] * (box.upper[j] - box.lower[j]);
        eval(theta, "grid");
    }

    // stage 2: Nelder-Mead from the best grid point
    std::vector<std::vector<double>> simplex;
    std::vector<double> fval;
    simplex.push_back(res.theta_star);
    for (std::size_t j = 0; j < d; ++j) {
        auto v = res.theta_star;
        const double span = box.upper[j] - box.lower[j];
        const double h = (span > 0.0) ? 0.05 * span : 0.05;
        v[j] += (v[j] + h <= box.upper[j]) ? h : -h;
        simplex.push_back(clamp_to_box(v, box));
    }
    for (const auto& v : simplex) fval.push_back(eval(v, "simplex"));

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    while (res.evals < budget) {
        // sort simplex by value
        std::vector<std::size_t> order(simplex.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fval[a] < fval[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        for (std::size_t i : order) {
            s2.push_back(simplex[i]);
            f2.push_back(fval[i]);
        }
        simplex = std::move(s2);
        fval = std::move(f2);

        if (fval.back() - fval.front() < 1e-6) break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i + 1 < simplex.size(); ++i)
            for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j];
        for (std::size_t j = 0; j < d; ++j) centroid[j] /= d;

        auto affine = [&](const std::vector<double>& p, double c) {
            std::vector<double> out(d);
            for (std::size_t j = 0; j < d; ++j)
                out[j] = centroid[j] + c * (p[j] - centroid[j]);
            return clamp_to_box(std::move(out), box);
        };

        const auto xr = affine(simplex.back(), -alpha);
        const double fr = eval(xr, "simplex");
        if (fr < fval.front()) {
            if (res.evals >= budget) break;
            const auto xe = affine(simplex.back(), -gamma);
            const double fe = eval(xe, "simplex");
            if (fe < fr) {
                simplex.back() = xe;
                fval.back() = fe;
            } else {
                simplex.back() = xr;
                fval.back() = fr;
            }
        } else if (fr < fval[fval.size() - 2]) {
            simplex.back() = xr;
            fval.back() = fr;
        } else {
            if (res.evals >= budget) break;
            const auto xc = affine(simplex.back(), rho);
            const double fc = eval(xc, "simplex");
            if (fc < fval.back()) {
                simplex.back() = xc;
                fval.back() = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 1; i < simplex.size() && res.evals < budget; ++i) {
                    for (std::size_t j = 0; j < d; ++j)
                        simplex[i][j] =
                            simplex[0][j] + sigma * (simplex[i][j] - simplex[0][j]);
                    simplex[i] = clamp_to_box(simplex[i], box);
                    fval[i] = eval(simplex[i], "simplex");
                }
            }
        }
    }
    return res;
}

}  // namespace snse
