#pragma once

// Dyadic cube covers of a box in the closed upper half-space, the partition
// of unity subordinate to them, and the boundary localizer eta_j.
//
// Level j uses the unit u = 2^{-j}; the cube with index z is
// u z + [-3u/4, 3u/4]^n and its shifted copy moves one unit up in x_n.

#include <array>
#include <cstdint>
#include <vector>

#include "tracelab/celliptic_operator.hpp"

namespace tracelab {

struct CoverCube {
    std::array<int, 3> z{};
    Cube cube;
    Cube shifted;
};

struct CubeCover {
    int j = 0;
    int n = 0;
    double unit = 1.0;
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};
    std::vector<CoverCube> cubes;                 // lexicographic in z
    std::array<std::array<int, 2>, 3> range{};   // inclusive z range per axis

    /// Indices of the cubes containing x (closed cubes).
    std::vector<std::size_t> containing(const double* x) const;
};

/// All cubes of level j meeting the box [lo, hi] (n = 2 or 3).
CubeCover build_cover(int j, int n, const std::array<double, 3>& lo, const std::array<double, 3>& hi);

struct CoverReport {
    bool covers = true;                  // (C1) on the probes
    int max_overlap = 0;                 // (C2)
    int generic_overlap = 0;             // overlap at a generic probe point
    double min_intersection = 0.0;       // (C3): nonempty pairwise intersections / u^n
    double max_intersection = 0.0;
    double intersection_constant = 0.0;  // smallest c with both inside [1/c, c]
};

CoverReport check_cover(const CubeCover& cover, std::size_t probes = 4096, std::uint64_t seed = 7);

/// One-dimensional profile in units of u: 1 for |t| <= 1/4, 0 for |t| >= 3/4,
/// a quintic smoothstep in between. Integer translates sum to 1.
double pou_profile(double t) noexcept;
double pou_profile_derivative(double t) noexcept;

class PartitionOfUnity {
public:
    explicit PartitionOfUnity(const CubeCover& cover) : cover_(&cover) {}

    const CubeCover& cover() const noexcept { return *cover_; }
    /// Unnormalized tensor bump of cube i at x.
    double psi(std::size_t i, const double* x) const;
    /// phi_i = psi_i / Σ_k psi_k.
    double phi(std::size_t i, const double* x) const;
    /// Σ_i phi_i(x) over the cubes of the cover.
    double sum(const double* x) const;
    /// Gradient of phi_i at x in physical units.
    std::array<double, 3> phi_gradient(std::size_t i, const double* x) const;

private:
    const CubeCover* cover_;
};

struct PartitionReport {
    double max_sum_error = 0.0;     // (PU1) max |Σ phi - 1| on probes
    double scaled_gradient = 0.0;   // (PU2) u * max |∂ phi| on probes
    double min_value = 0.0;
    double max_value = 0.0;
};

PartitionReport check_partition(const PartitionOfUnity& pou, std::size_t probes = 4096, std::uint64_t seed = 11);

/// eta_j(x) = eta(2^{j+1} x_n).
double localizer(int j, double x_n) noexcept;
double localizer_derivative(int j, double x_n) noexcept;

struct LocalizerReport {
    bool sandwich = true;          // 1_{H_{j+1}} <= eta_j <= 1_{H_j} on the probes
    double scaled_gradient = 0.0;  // 2^{-j} max |∂ eta_j|
};

LocalizerReport check_localizer(int j, std::size_t probes = 10000);

}  // namespace tracelab
