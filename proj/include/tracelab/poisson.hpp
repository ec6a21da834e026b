#pragma once

// Poisson kernel of the upper half-space and the discrete extension.
//
// K(x', t) = c_n t / (t^2 + |x'|^2)^{n/2}, c_n = Gamma(n/2) / pi^{n/2}.
// The discrete extension convolves f with K(., t) over the offset window
// |d_k| <= 2L/h, with the table rescaled per level so that its lattice sum
// equals the exact continuum mass of the window. The rescaled table is a
// radially decreasing sub-probability kernel, which makes sup |v| <= sup |f|
// exact and keeps |v| below the discrete maximal function up to ladder gaps.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tracelab/grid.hpp"
#include "tracelab/maximal.hpp"

namespace tracelab {

/// Gamma(n/2) / pi^{n/2}.
double poisson_constant(int n);

/// Throws DomainError for x_n <= 0. x_prime.size() = n - 1.
double poisson_kernel(std::span<const double> x_prime, double x_n);

/// Exact ∫_{[-a, a]^dim} K(x', t) dx' for dim in {1, 2}.
double poisson_window_mass(int dim, double half_width, double t);

/// h^dim Σ_{|d_k| <= 2m} K(d h, t) without rescaling.
double poisson_lattice_mass(const BoundaryGrid& grid, double t);

/// v(., t) for each level; a leading level 0 holds f itself.
/// Throws DomainError for negative levels.
HalfSpaceField poisson_extend(const BoundaryGridFunction& f, std::vector<double> levels);

struct DominationReport {
    double max_violation = 0.0;     // max over grid of |v| - Mf (may be negative)
    std::size_t node = 0;           // location of the maximum
    std::size_t level = 0;
    std::size_t violations = 0;     // points with |v| - Mf > tol
    double tol = 0.0;

    double gap() const noexcept { return max_violation > 0.0 ? max_violation : 0.0; }
};

DominationReport check_maximal_domination(const HalfSpaceField& v, const BoundaryGridFunction& f,
                                          const RadiusLadder& ladder, double tol = 0.0);
DominationReport check_maximal_domination(const HalfSpaceField& v, const BoundaryGridFunction& maximal,
                                          double tol = 0.0);

/// sup over levels of |v(x', x_n)|, per boundary node.
BoundaryGridFunction vertical_maximal(const HalfSpaceField& v);

struct GrowthRow {
    double H = 0.0;
    double strip_norm = 0.0;
    double fitted_exponent = 0.0;  // local log-log slope against the previous row; NaN for the first
};

struct GrowthTable {
    std::vector<GrowthRow> rows;
    double fitted_exponent = 0.0;  // least-squares log-log slope over all rows

    bool strictly_increasing() const;
    double last_over_first() const;
};

/// ‖v‖_{L^p(R^{n-1} x (0, H])} for each H, each H being one of the levels.
GrowthTable strip_growth(const HalfSpaceField& v, double p, std::span<const double> heights);

enum class DivergenceData { power_decay, compact_control };

struct DivergenceSetup {
    double L = 1024.0;
    double h = 0.5;
    double level_min = 0.5;     // smallest positive level
    int levels_per_octave = 4;
    DivergenceData data = DivergenceData::power_decay;
};

/// Boundary data of the experiment: (1 + |x'|)^{-alpha}, or for the control
/// an odd compactly supported bump x_1 (1 - |x'|^2)_+^3 with zero mean.
BoundaryGridFunction divergence_data(const BoundaryGrid& grid, double alpha, DivergenceData kind);

/// Strip norms of the Poisson extension for increasing heights.
/// Requires (n-1)/p < alpha <= n/p and strictly increasing heights.
GrowthTable divergence_experiment(double alpha, double p, int n, std::span<const double> heights,
                                  const DivergenceSetup& setup = {});

}  // namespace tracelab
