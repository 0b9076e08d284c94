#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "snse/mode.hpp"

namespace snse {

using cplx = std::complex<double>;

/// Divergence-free velocity field on the truncated Fourier basis.
/// Each mode k carries one complex amplitude a_k multiplying the unit
/// divergence-free direction kperp/|k|, so incompressibility is structural.
/// Storage is dense over the (2N+1)^2 band; the zero-mode slot stays zero.
class SpectralField {
public:
    explicit SpectralField(int trunc)
        : trunc_(trunc),
          side_(2 * trunc + 1),
          amps_(static_cast<std::size_t>(side_) * side_, cplx{0.0, 0.0}) {
        if (trunc < 1) throw std::invalid_argument("truncation level must be >= 1");
    }

    int trunc() const { return trunc_; }

    cplx at(Mode k) const {
        require_mode(k, trunc_);
        return amps_[index(k)];
    }

    void set(Mode k, cplx a) {
        require_mode(k, trunc_);
        amps_[index(k)] = a;
    }

    /// Visits every mode in the band (zero mode skipped), amplitude included.
    template <typename F>
    void for_each(F&& f) const {
        for (int kx = -trunc_; kx <= trunc_; ++kx)
            for (int ky = -trunc_; ky <= trunc_; ++ky) {
                if (kx == 0 && ky == 0) continue;
                f(Mode{kx, ky}, amps_[index(Mode{kx, ky})]);
            }
    }

    SpectralField& operator+=(const SpectralField& o) {
        check_same(o);
        for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += o.amps_[i];
        return *this;
    }

    SpectralField& operator-=(const SpectralField& o) {
        check_same(o);
        for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] -= o.amps_[i];
        return *this;
    }

    SpectralField& operator*=(cplx c) {
        for (auto& a : amps_) a *= c;
        return *this;
    }

    SpectralField& operator*=(double c) { return (*this) *= cplx{c, 0.0}; }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double c, SpectralField a) { return a *= c; }

    bool finite() const {
        for (const auto& a : amps_)
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
        return true;
    }

    // raw slot access for hot loops; caller guarantees band membership
    cplx raw(int kx, int ky) const { return amps_[index(Mode{kx, ky})]; }
    void raw_add(int kx, int ky, cplx a) { amps_[index(Mode{kx, ky})] += a; }

private:
    std::size_t index(Mode k) const {
        return static_cast<std::size_t>(k.kx + trunc_) * side_ + (k.ky + trunc_);
    }

    void check_same(const SpectralField& o) const {
        if (o.trunc_ != trunc_)
            throw std::invalid_argument("truncation mismatch between fields");
    }

    int trunc_;
    int side_;
    std::vector<cplx> amps_;
};

struct SobolevNorms {
    double h = 0.0;  ///< ||u||_H
    double v = 0.0;  ///< ||u||_V
    double a = 0.0;  ///< ||Au||_H
};

/// Parseval sums over the orthonormal basis; h <= v <= a since lambda >= 1.
inline SobolevNorms sobolev_norms(const SpectralField& u) {
    double sh = 0.0, sv = 0.0, sa = 0.0;
    u.for_each([&](Mode k, cplx a) {
        const double m2 = std::norm(a);
        const double lam = mode_lambda(k);
        sh += m2;
        sv += lam * m2;
        sa += lam * lam * m2;
    });
    return {std::sqrt(sh), std::sqrt(sv), std::sqrt(sa)};
}

inline double norm_h(const SpectralField& u) { return sobolev_norms(u).h; }
inline double norm_v(const SpectralField& u) { return sobolev_norms(u).v; }

/// H inner product <u,v> = sum a_k conj(b_k); real for conjugate-paired fields.
inline cplx inner_h(const SpectralField& u, const SpectralField& v) {
    cplx s{0.0, 0.0};
    u.for_each([&](Mode k, cplx a) { s += a * std::conj(v.at(k)); });
    return s;
}

/// V inner product <u,v>_V = sum lambda(k) a_k conj(b_k).
inline cplx inner_v(const SpectralField& u, const SpectralField& v) {
    cplx s{0.0, 0.0};
    u.for_each([&](Mode k, cplx a) { s += mode_lambda(k) * a * std::conj(v.at(k)); });
    return s;
}

/// Stokes operator: diagonal with eigenvalues lambda(k) = |k|^2.
inline SpectralField apply_stokes(const SpectralField& u) {
    SpectralField out(u.trunc());
    u.for_each([&](Mode k, cplx a) { out.set(k, mode_lambda(k) * a); });
    return out;
}

/// ||curl u||_H. On this divergence-free basis the curl coefficient is
/// i k . (kperp/|k|) rotated, with magnitude |k| |a_k|, so the norm equals
/// ||u||_V; the sum below is the independent curl-coefficient route.
inline double vorticity_norm(const SpectralField& u) {
    double s = 0.0;
    u.for_each([&](Mode k, cplx a) { s += mode_lambda(k) * std::norm(a); });
    return std::sqrt(s);
}

/// One raw (not yet projected) Fourier coefficient of a velocity field.
struct RawCoefficient {
    Mode k;
    cplx vx;
    cplx vy;
};

/// Leray projection: v(k) -> v(k) - (k.v(k)) k/|k|^2, stored as the
/// amplitude along kperp/|k|. Idempotent and self-adjoint by construction.
inline SpectralField project_leray(const std::vector<RawCoefficient>& raw, int trunc) {
    SpectralField out(trunc);
    for (const auto& c : raw) {
        require_mode(c.k, trunc);
        const double kx = c.k.kx, ky = c.k.ky;
        const double klen = std::sqrt(kx * kx + ky * ky);
        // component along the unit vector kperp/|k| = (-ky, kx)/|k|
        const cplx amp = (c.vx * (-ky) + c.vy * kx) / klen;
        out.set(c.k, out.at(c.k) + amp);
    }
    return out;
}

/// Physical-space velocity samples on a uniform grid_n x grid_n grid of the
/// torus, by direct evaluation of u(x) = sum a_k (kperp/|k|) e^{ik.x}/(2pi).
inline std::vector<std::array<cplx, 2>> inverse_transform(const SpectralField& u,
                                                          int grid_n) {
    const double two_pi = 2.0 * M_PI;
    std::vector<std::array<cplx, 2>> out(static_cast<std::size_t>(grid_n) * grid_n,
                                         {cplx{0, 0}, cplx{0, 0}});
    for (int ix = 0; ix < grid_n; ++ix) {
        for (int iy = 0; iy < grid_n; ++iy) {
            const double x = two_pi * ix / grid_n;
            const double y = two_pi * iy / grid_n;
            cplx vx{0, 0}, vy{0, 0};
            u.for_each([&](Mode k, cplx a) {
                const double klen = std::sqrt(mode_lambda(k));
                const cplx phase = std::exp(cplx{0.0, k.kx * x + k.ky * y});
                const cplx w = a * phase / (two_pi * klen);
                vx += w * cplx{static_cast<double>(-k.ky), 0.0};
                vy += w * cplx{static_cast<double>(k.kx), 0.0};
            });
            out[static_cast<std::size_t>(ix) * grid_n + iy] = {vx, vy};
        }
    }
    return out;
}

}  // namespace snse
