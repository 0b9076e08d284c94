#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace snse {

/// Wavevector on the 2-pi-periodic torus. The zero mode is excluded
/// (mean-zero fields), so every retained mode has lambda(k) = |k|^2 >= 1
/// and the Poincare constant on this basis is 1.
struct Mode {
    int kx = 0;
    int ky = 0;

    friend bool operator==(const Mode&, const Mode&) = default;
};

inline double mode_lambda(Mode k) {
    return static_cast<double>(k.kx) * k.kx + static_cast<double>(k.ky) * k.ky;
}

inline bool mode_in_band(Mode k, int trunc) {
    return (k.kx != 0 || k.ky != 0) && std::abs(k.kx) <= trunc &&
           std::abs(k.ky) <= trunc;
}

inline void require_mode(Mode k, int trunc) {
    if (k.kx == 0 && k.ky == 0)
        throw std::invalid_argument("mode (0,0) is excluded (mean-zero fields)");
    if (std::abs(k.kx) > trunc || std::abs(k.ky) > trunc)
        throw std::invalid_argument("mode (" + std::to_string(k.kx) + "," +
                                    std::to_string(k.ky) +
                                    ") outside truncation band N=" +
                                    std::to_string(trunc));
}

}  // namespace snse
