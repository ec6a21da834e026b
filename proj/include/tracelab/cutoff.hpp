#pragma once

// Quintic smoothstep ramp and the cutoff built from it:
// eta = 1 on [0, 1], eta = 0 on [2, ∞), max |eta'| = 15/8 at t = 3/2.

#include <algorithm>

namespace tracelab {

/// S(t) = 6t^5 - 15t^4 + 10t^3 on [0, 1], clamped outside.
constexpr double smoothstep(double t) noexcept {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

constexpr double smoothstep_derivative(double t) noexcept {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double u = t * (1.0 - t);
    return 30.0 * u * u;
}

struct SmoothCutoff {
    static constexpr double plateau_end = 1.0;
    static constexpr double support_end = 2.0;
    static constexpr double max_slope = 15.0 / 8.0;

    constexpr double operator()(double t) const noexcept { return 1.0 - smoothstep(t - 1.0); }
    constexpr double derivative(double t) const noexcept { return -smoothstep_derivative(t - 1.0); }
};

inline constexpr SmoothCutoff smooth_cutoff() noexcept { return {}; }

}  // namespace tracelab
