#include "snse/bilinear.hpp"

#include <cmath>
#include <vector>

namespace snse {

namespace {

struct ActiveMode {
    int kx, ky;
    double klen;
    cplx amp;
};

std::vector<ActiveMode> active_modes(const SpectralField& f) {
    std::vector<ActiveMode> out;
    f.for_each([&](Mode k, cplx a) {
        if (a != cplx{0.0, 0.0})
            out.push_back({k.kx, k.ky, std::sqrt(mode_lambda(k)), a});
    });
    return out;
}

}  // namespace

SpectralField nonlinear_b(const SpectralField& u, const SpectralField& v) {
    if (u.trunc() != v.trunc())
        throw std::invalid_argument("nonlinear_b: truncation mismatch");
    const int n = u.trunc();
    SpectralField out(n);

    // With e_k = (kperp/|k|) e^{ik.x}/(2pi), the amplitude of B(u,v) along
    // e_k is  (i/2pi) sum_{p+q=k} a_p b_q (pperp.q)/|p| * (q.k)/(|q||k|),
    // using qperp.kperp = q.k.
    const std::vector<ActiveMode> us = active_modes(u);
    const std::vector<ActiveMode> vs = active_modes(v);
    const double inv_two_pi = 1.0 / (2.0 * M_PI);

    for (const auto& p : us) {
        for (const auto& q : vs) {
            const int kx = p.kx + q.kx;
            const int ky = p.ky + q.ky;
            if ((kx == 0 && ky == 0) || std::abs(kx) > n || std::abs(ky) > n)
                continue;
            const double pperp_dot_q = -static_cast<double>(p.ky) * q.kx +
                                       static_cast<double>(p.kx) * q.ky;
            if (pperp_dot_q == 0.0) continue;
            const double q_dot_k = static_cast<double>(q.kx) * kx +
                                   static_cast<double>(q.ky) * ky;
            const double klen = std::sqrt(static_cast<double>(kx) * kx +
                                          static_cast<double>(ky) * ky);
            const double geom =
                inv_two_pi * pperp_dot_q / p.klen * q_dot_k / (q.klen * klen);
            out.raw_add(kx, ky, cplx{0.0, geom} * p.amp * q.amp);
        }
    }
    return out;
}

}  // namespace snse
