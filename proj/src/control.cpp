#include "snse/control.hpp"

#include <set>

namespace snse {

namespace {

template <typename T>
void validate_profile(const TimeProfile<T>& p, double horizon, const char* what) {
    if (p.t.size() < 2 || p.t.size() != p.v.size())
        throw std::invalid_argument(std::string(what) + ": profile needs >= 2 breakpoints");
    if (std::abs(p.t.front()) > 1e-12 || std::abs(p.t.back() - horizon) > 1e-9)
        throw std::invalid_argument(std::string(what) + ": profile must span [0, T]");
    for (std::size_t i = 0; i + 1 < p.t.size(); ++i)
        if (p.t[i + 1] < p.t[i])
            throw std::invalid_argument(std::string(what) + ": breakpoints not sorted");
}

/// Exact integral of a piecewise-linear profile over [a,b].
template <typename T>
T integrate(const TimeProfile<T>& p, double a, double b) {
    std::vector<double> ts{a, b};
    for (double t : p.t)
        if (t > a && t < b) ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    T acc{};
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double h = ts[i + 1] - ts[i];
        if (h <= 0.0) continue;
        acc += (p.eval(ts[i]) + p.eval(ts[i + 1])) * (0.5 * h);
    }
    return acc;
}

template <typename T>
TimeProfile<T> mollify(const TimeProfile<T>& p, double horizon, int n) {
    TimeProfile<T> out;
    for (int i = 0; i < n; ++i) {
        const double a = horizon * i / n;
        const double b = horizon * (i + 1) / n;
        const T avg = integrate(p, a, b) * (1.0 / (b - a));
        out.t.push_back(a);
        out.v.push_back(avg);
        out.t.push_back(b);
        out.v.push_back(avg);
    }
    return out;
}

}  // namespace

FeedbackControl::FeedbackControl(double horizon, double cap_k, double state_radius,
                                 std::vector<ControlEntry> entries)
    : horizon_(horizon), cap_k_(cap_k), state_radius_(state_radius),
      entries_(std::move(entries)) {
    if (!(horizon > 0.0)) throw std::invalid_argument("control horizon must be > 0");
    if (!(cap_k > 0.0)) throw std::invalid_argument("control cap_K must be > 0");
    if (!(state_radius > 0.0))
        throw std::invalid_argument("control state_radius must be > 0");

    double max_gain = 0.0, gain_slope = 0.0, base_slope_sq = 0.0;
    bool time_varying = false;
    for (auto& e : entries_) {
        require_mode(e.k, 1 << 20);
        validate_profile(e.gain, horizon, "gain");
        validate_profile(e.base, horizon, "base");
        max_gain = std::max(max_gain, e.gain.max_abs());
        gain_slope = std::max(gain_slope, e.gain.max_slope());
        const double s = e.base.max_slope();
        base_slope_sq += mode_lambda(e.k) * s * s;
        time_varying = time_varying || !e.gain.is_constant() || !e.base.is_constant();
    }
    // Delta phi = [gamma(t1)-gamma(t2)] x1 + [f(t1)-f(t2)] + gamma(t2)(x1-x2);
    // splitting the square costs a factor 2 when profiles vary in time.
    if (time_varying) {
        const double s = gain_slope * state_radius_ + std::sqrt(base_slope_sq);
        c1_ = 2.0 * s * s;
        c2_ = 2.0 * max_gain * max_gain;
    } else {
        c1_ = 0.0;
        c2_ = max_gain * max_gain;
    }
}

FeedbackControl FeedbackControl::null(double horizon, double cap_k) {
    return FeedbackControl(horizon, cap_k, 1.0, {});
}

int FeedbackControl::max_mode_band() const {
    int m = 0;
    for (const auto& e : entries_)
        m = std::max({m, std::abs(e.k.kx), std::abs(e.k.ky)});
    return m;
}

ControlEval eval_control(const FeedbackControl& phi, double t, const SpectralField& u) {
    if (t < -1e-12 || t > phi.horizon() + 1e-9)
        throw std::invalid_argument("eval_control: t outside [0, T]");
    ControlEval out{SpectralField(u.trunc()), false};
    for (const auto& e : phi.entries()) {
        require_mode(e.k, u.trunc());
        const cplx val = e.gain.eval(t) * u.at(e.k) + e.base.eval(t);
        out.field.set(e.k, out.field.at(e.k) + val);
    }
    const double vn = norm_v(out.field);
    if (vn > phi.cap_k()) {
        out.field *= phi.cap_k() / vn;
        out.capped = true;
    }
    return out;
}

OperatorDistance lv_operator_distance(const FeedbackControl& a, const FeedbackControl& b) {
    if (std::abs(a.horizon() - b.horizon()) > 1e-12)
        throw std::invalid_argument("lv_operator_distance: horizon mismatch");

    // union of controlled modes; a missing entry acts as the zero profile
    struct Pair {
        const ControlEntry* ea = nullptr;
        const ControlEntry* eb = nullptr;
    };
    std::vector<std::pair<Mode, Pair>> modes;
    auto slot = [&](Mode k) -> Pair& {
        for (auto& m : modes)
            if (m.first == k) return m.second;
        modes.push_back({k, {}});
        return modes.back().second;
    };
    for (const auto& e : a.entries()) slot(e.k).ea = &e;
    for (const auto& e : b.entries()) slot(e.k).eb = &e;

    // evaluation times: all breakpoints plus a left-limit sample per segment
    // (profiles may carry jumps from time-mollified sequences)
    std::set<double> tset{0.0, a.horizon()};
    auto add_times = [&](const FeedbackControl& c) {
        for (const auto& e : c.entries()) {
            for (double t : e.gain.t) tset.insert(t);
            for (double t : e.base.t) tset.insert(t);
        }
    };
    add_times(a);
    add_times(b);
    std::vector<double> times(tset.begin(), tset.end());
    std::vector<double> samples = times;
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        samples.push_back(times[i + 1] - 1e-9 * (times[i + 1] - times[i]));

    OperatorDistance d;
    for (double t : samples) {
        if (t < 0.0 || t > a.horizon()) continue;
        double gmax = 0.0, base_sq = 0.0;
        for (const auto& [k, p] : modes) {
            const double ga = p.ea ? p.ea->gain.eval(t) : 0.0;
            const double gb = p.eb ? p.eb->gain.eval(t) : 0.0;
            gmax = std::max(gmax, std::abs(ga - gb));
            const cplx fa = p.ea ? p.ea->base.eval(t) : cplx{};
            const cplx fb = p.eb ? p.eb->base.eval(t) : cplx{};
            base_sq += mode_lambda(k) * std::norm(fa - fb);
        }
        d.linear = std::max(d.linear, gmax);
        d.base = std::max(d.base, std::sqrt(base_sq));
    }
    return d;
}

FeedbackControl control_sequence(const FeedbackControl& phi, int n, SequenceScheme scheme) {
    if (n < 1) throw std::invalid_argument("control_sequence: n must be >= 1");
    std::vector<ControlEntry> entries;
    const double scale = 1.0 + 1.0 / n;
    for (const auto& e : phi.entries()) {
        switch (scheme) {
            case SequenceScheme::GainScale: {
                ControlEntry out = e;
                for (auto& v : out.gain.v) v *= scale;
                for (auto& v : out.base.v) v *= scale;
                entries.push_back(std::move(out));
                break;
            }
            case SequenceScheme::ModeTruncate: {
                if (std::max(std::abs(e.k.kx), std::abs(e.k.ky)) <= n)
                    entries.push_back(e);
                break;
            }
            case SequenceScheme::TimeMollify: {
                ControlEntry out = e;
                out.gain = mollify(e.gain, phi.horizon(), n);
                out.base = mollify(e.base, phi.horizon(), n);
                entries.push_back(std::move(out));
                break;
            }
        }
    }
    return FeedbackControl(phi.horizon(), phi.cap_k(), phi.state_radius(),
                           std::move(entries));
}

}  // namespace snse
