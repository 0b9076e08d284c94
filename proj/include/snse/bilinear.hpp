#pragma once

#include "snse/field.hpp"

namespace snse {

/// Galerkin-truncated advection term B(u,v) = P_H(u . grad v), computed as
/// the exact double-sum convolution over stored modes and projected back to
/// the |k|_inf <= N band. Bilinear in (u,v); <B(u,v), v> = 0.
SpectralField nonlinear_b(const SpectralField& u, const SpectralField& v);

}  // namespace snse
