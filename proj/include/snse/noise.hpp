#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "snse/field.hpp"

namespace snse {

enum class NoiseKind { Off, Additive, DiagonalMultiplicative };

/// Finite family {g_k} driving the noise term g(u) dW: one independent
/// Brownian direction per forced mode, with weights q_k = lambda(k)^(-alpha/2).
/// Sublinearity and Lipschitz constants are computable in closed form:
///   K1 = sigma * sqrt(sum q_k^2),  K2 = sigma * max_k q_k.
class NoiseModel {
public:
    NoiseModel() = default;  // kind Off

    NoiseModel(NoiseKind kind, double sigma, double alpha, std::vector<Mode> forced)
        : kind_(kind), sigma_(sigma), alpha_(alpha), forced_(std::move(forced)) {
        if (sigma < 0.0) throw std::invalid_argument("noise sigma must be >= 0");
        if (kind != NoiseKind::Off && !(alpha > 1.0))
            throw std::invalid_argument("noise alpha must be > 1");
        weights_.reserve(forced_.size());
        for (Mode k : forced_) {
            if (k.kx == 0 && k.ky == 0)
                throw std::invalid_argument("noise on the zero mode is not allowed");
            weights_.push_back(std::pow(mode_lambda(k), -alpha / 2.0));
        }
    }

    NoiseKind kind() const { return kind_; }
    double sigma() const { return sigma_; }
    double alpha() const { return alpha_; }
    const std::vector<Mode>& forced_modes() const { return forced_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t n_directions() const {
        return kind_ == NoiseKind::Off ? 0 : forced_.size();
    }

    /// Sublinearity constant K1 in ||g(u)||_{L2(U,H)} <= K1 (1 + ||u||_H).
    double k1() const {
        if (kind_ == NoiseKind::Off) return 0.0;
        double s = 0.0;
        for (double q : weights_) s += q * q;
        return sigma_ * std::sqrt(s);
    }

    /// V-level Lipschitz constant K2 (additive noise is 0-Lipschitz but K2
    /// is still a valid constant).
    double k2() const {
        if (kind_ == NoiseKind::Off) return 0.0;
        double m = 0.0;
        for (double q : weights_) m = std::max(m, q);
        return sigma_ * m;
    }

private:
    NoiseKind kind_ = NoiseKind::Off;
    double sigma_ = 0.0;
    double alpha_ = 2.0;
    std::vector<Mode> forced_;
    std::vector<double> weights_;
};

/// sum_k g_k(t,u) dW_k. Additive: g_k = sigma q_k e_k; diagonal
/// multiplicative: g_k = sigma q_k <u,e_k>_H e_k. The t argument is kept for
/// the interface; the built-in families are time-independent.
inline SpectralField diffusion_apply(const NoiseModel& g, double /*t*/,
                                     const SpectralField& u,
                                     const std::vector<double>& dw) {
    SpectralField out(u.trunc());
    if (g.kind() == NoiseKind::Off) {
        if (!dw.empty())
            throw std::invalid_argument("diffusion_apply: increments given for kind=off");
        return out;
    }
    if (dw.size() != g.n_directions())
        throw std::invalid_argument("diffusion_apply: increment length mismatch");
    const auto& modes = g.forced_modes();
    const auto& q = g.weights();
    for (std::size_t j = 0; j < modes.size(); ++j) {
        cplx coef{g.sigma() * q[j], 0.0};
        if (g.kind() == NoiseKind::DiagonalMultiplicative) coef *= u.at(modes[j]);
        out.set(modes[j], out.at(modes[j]) + coef * dw[j]);
    }
    return out;
}

struct HsNorms {
    double in_h = 0.0;
    double in_v = 0.0;
};

/// Hilbert-Schmidt norms (sum_k ||g_k(t,u)||_X^2)^{1/2} for X = H and V.
inline HsNorms hs_norms(const NoiseModel& g, double /*t*/, const SpectralField& u) {
    if (g.kind() == NoiseKind::Off) return {0.0, 0.0};
    double sh = 0.0, sv = 0.0;
    const auto& modes = g.forced_modes();
    const auto& q = g.weights();
    for (std::size_t j = 0; j < modes.size(); ++j) {
        double m2 = g.sigma() * g.sigma() * q[j] * q[j];
        if (g.kind() == NoiseKind::DiagonalMultiplicative)
            m2 *= std::norm(u.at(modes[j]));
        sh += m2;
        sv += mode_lambda(modes[j]) * m2;
    }
    return {std::sqrt(sh), std::sqrt(sv)};
}

}  // namespace snse
