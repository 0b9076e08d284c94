#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "snse/field.hpp"

namespace snse {

/// Piecewise-linear time profile on [0,T], given by sorted breakpoints.
/// Duplicate abscissae encode jumps (used by the mollified sequences).
template <typename T>
struct TimeProfile {
    std::vector<double> t;
    std::vector<T> v;

    static TimeProfile constant(double horizon, T value) {
        return {{0.0, horizon}, {value, value}};
    }

    T eval(double s) const {
        if (t.empty()) return T{};
        if (s <= t.front()) return v.front();
        if (s >= t.back()) return v.back();
        // last segment whose left endpoint is <= s
        std::size_t i = 0;
        while (i + 2 < t.size() && t[i + 1] <= s) ++i;
        const double dt = t[i + 1] - t[i];
        if (dt <= 0.0) return v[i + 1];
        const double w = (s - t[i]) / dt;
        return v[i] * (1.0 - w) + v[i + 1] * w;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& x : v) m = std::max(m, std::abs(x));
        return m;
    }

    double max_slope() const {
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < t.size(); ++i) {
            const double dt = t[i + 1] - t[i];
            if (dt > 0.0) m = std::max(m, std::abs(v[i + 1] - v[i]) / dt);
        }
        return m;
    }

    bool is_constant() const {
        for (const auto& x : v)
            if (std::abs(x - v.front()) != 0.0) return false;
        return true;
    }
};

/// One controlled mode: diagonal gain gamma_k(t) plus base forcing f_k(t).
struct ControlEntry {
    Mode k;
    TimeProfile<double> gain;
    TimeProfile<cplx> base;
};

/// Admissible affine feedback law
///   phi(t,u) = sum_k [gamma_k(t) <u,e_k>_H + f_k(t)] e_k,
/// V-norm-capped at cap_k as a safety net (experiments are configured so the
/// cap never fires on the stopping-time ball). The time-Lipschitz constant c1
/// is only uniform over states with ||u||_V <= state_radius, which bounds the
/// gamma'(t) u contribution.
class FeedbackControl {
public:
    FeedbackControl(double horizon, double cap_k, double state_radius,
                    std::vector<ControlEntry> entries);

    /// Null control on the given horizon.
    static FeedbackControl null(double horizon, double cap_k = 1.0);

    double horizon() const { return horizon_; }
    double cap_k() const { return cap_k_; }
    double state_radius() const { return state_radius_; }
    const std::vector<ControlEntry>& entries() const { return entries_; }

    /// Time-Lipschitz constant C1 of the uncapped law (0 for constant profiles).
    double c1() const { return c1_; }
    /// State-Lipschitz constant C2 of the uncapped law.
    double c2() const { return c2_; }

    int max_mode_band() const;

private:
    double horizon_;
    double cap_k_;
    double state_radius_;
    std::vector<ControlEntry> entries_;
    double c1_ = 0.0;
    double c2_ = 0.0;
};

struct ControlEval {
    SpectralField field;
    bool capped = false;
};

/// Evaluates phi(t,u); sets the cap flag when the V-norm cap rescales the
/// output (linearity broken). Throws when t is outside [0, horizon].
ControlEval eval_control(const FeedbackControl& phi, double t, const SpectralField& u);

struct OperatorDistance {
    double linear = 0.0;  ///< sup_t ||linear part difference||_L(V)
    double base = 0.0;    ///< sup_t ||f_a(t) - f_b(t)||_V
};

/// sup over the breakpoint grid of the V-operator norm of the linear-part
/// difference; exact for diagonal gains (max_k |gamma^a_k - gamma^b_k|).
OperatorDistance lv_operator_distance(const FeedbackControl& a, const FeedbackControl& b);

enum class SequenceScheme { GainScale, ModeTruncate, TimeMollify };

/// phi_n with lv_operator_distance(phi, phi_n) -> 0 as n -> infinity.
FeedbackControl control_sequence(const FeedbackControl& phi, int n, SequenceScheme scheme);

}  // namespace snse
