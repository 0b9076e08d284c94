#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace snse {

/// Counter-based random numbers: every draw is a pure function of the tuple
/// (seed, path, step, direction), so streams are reproducible and identical
/// across thread counts and execution orders.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t path,
                         std::uint64_t step, std::uint64_t dir) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ mix64(path ^ 0x6a09e667f3bcc908ULL));
    h = mix64(h ^ mix64(step ^ 0xbb67ae8584caa73bULL));
    h = mix64(h ^ mix64(dir ^ 0x3c6ef372fe94f82bULL));
    return h;
}

/// Uniform in (0,1), never exactly 0 or 1.
inline double to_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw for one counter tuple (Box-Muller).
inline double gaussian(std::uint64_t seed, std::uint64_t path,
                       std::uint64_t step, std::uint64_t dir) {
    const std::uint64_t h = key(seed, path, step, dir);
    const double u1 = to_unit(mix64(h ^ 0xa5a5a5a5a5a5a5a5ULL));
    const double u2 = to_unit(mix64(h ^ 0x5a5a5a5a5a5a5a5aULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Uniform in (0,1) for one counter tuple (used by instance generators).
inline double uniform(std::uint64_t seed, std::uint64_t path,
                      std::uint64_t step, std::uint64_t dir) {
    return to_unit(key(seed, path, step, dir));
}

}  // namespace rng

/// Brownian increments for one time step: n_dirs independent N(0, dt) draws,
/// a deterministic function of (seed, path_index, step_index, direction).
inline std::vector<double> sample_increments(std::uint64_t seed,
                                             std::uint64_t path_index,
                                             std::uint64_t step_index,
                                             std::size_t n_dirs, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increments: dt must be > 0");
    std::vector<double> out(n_dirs);
    const double s = std::sqrt(dt);
    for (std::size_t d = 0; d < n_dirs; ++d)
        out[d] = s * rng::gaussian(seed, path_index, step_index, d);
    return out;
}

}  // namespace snse
