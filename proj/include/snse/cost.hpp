#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "snse/field.hpp"

namespace snse {

enum class CostKind { Vorticity, VTracking };

/// Running cost L and the concave transform parameters.
///   vorticity:   L = ||curl u||_H                   (independent of phi, t)
///   v-tracking:  L = ||u - target||_V + ||phi||_H   (exercises the control slot)
struct CostSpec {
    CostKind kind = CostKind::Vorticity;
    double eps = 0.5;        ///< concavity exponent, in (0,1)
    double lip_l = 1.0;      ///< Lipschitz constant of Eq-style bound on L^2
    std::optional<SpectralField> target;  ///< v-tracking only

    void validate() const {
        if (!(eps > 0.0 && eps < 1.0))
            throw std::invalid_argument("cost eps must be in (0,1)");
        if (kind == CostKind::VTracking && !target)
            throw std::invalid_argument("v-tracking cost requires a target field");
    }
};

/// phi(x) = (log(1+x))^{1-eps}: increasing, concave, phi(0)=0, subadditive.
inline double concave_transform(double x, double eps) {
    if (x < 0.0) throw std::invalid_argument("concave_transform: x must be >= 0");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("concave_transform: eps must be in (0,1)");
    return std::pow(std::log1p(x), 1.0 - eps);
}

inline double running_cost(const CostSpec& spec, double /*t*/, const SpectralField& u,
                           const SpectralField& phi_val) {
    spec.validate();
    switch (spec.kind) {
        case CostKind::Vorticity:
            return vorticity_norm(u);
        case CostKind::VTracking:
            return norm_v(u - *spec.target) + norm_h(phi_val);
    }
    return 0.0;
}

}  // namespace snse
