#pragma once

// Truncation lifting u = eta(x_n |v|^beta) v of boundary data f, where v is
// the Poisson extension and beta = q/p - 1, plus the checks on its bounds and
// the mollifier lifting used for bounded data.

#include <cstddef>
#include <optional>
#include <vector>

#include "tracelab/exponents.hpp"
#include "tracelab/grid.hpp"
#include "tracelab/maximal.hpp"
#include "tracelab/norms.hpp"
#include "tracelab/report.hpp"

namespace tracelab {

struct TruncationExtension {
    ExponentSet exponents;
    BoundaryGridFunction f;
    HalfSpaceField v;
    HalfSpaceField u;

    /// x_n |v|^beta at (node, level).
    double psi(std::size_t node, std::size_t k) const;
};

/// 0 together with h_min * ratio^k up to x_max.
std::vector<double> truncation_levels(double h_min, double ratio, double x_max);

/// Throws DomainError for q = ∞ or invalid exponents, or for non-finite data.
TruncationExtension nonlinear_extend(const BoundaryGridFunction& f, const ExponentSet& e,
                                     std::vector<double> levels);

/// max psi over points where u != 0, against the bound 2. Exact: no tolerance.
CheckRow support_check(const TruncationExtension& ext);

struct PointwiseReport {
    CheckRow row;             // value = max(|u| - min(Mf, (2/x_n)^{1/beta})), bound = tol
    double domination_gap = 0.0;
    std::size_t node = 0;
    std::size_t level = 0;
};

/// Pointwise bound against the discrete maximal function. tol defaults to
/// twice the observed domination gap of v plus a rounding allowance.
PointwiseReport pointwise_bound_check(const TruncationExtension& ext, const BoundaryGridFunction& maximal,
                                      std::optional<double> tol = std::nullopt);

/// Per node: level quadrature of |u|^q divided by Mf^r, maximized; bound 2q/r.
CheckRow step1_bound_check(const TruncationExtension& ext, const BoundaryGridFunction& maximal);
double step1_constant(const ExponentSet& e);

struct ChiefBoundReport {
    bool trivial = false;
    double lhs = 0.0;   // ‖u‖_q + ‖∇u‖_p
    double rhs = 0.0;   // ‖f‖_r^{r/q} + ‖f‖_r^{r/p} + [f]_{1-1/p,p}
    double ratio = 0.0;
};

ChiefBoundReport chief_bound_check(const TruncationExtension& ext,
                                   std::size_t seminorm_cap = default_seminorm_node_cap);

struct TraceRecoveryReport {
    double h_min = 0.0;
    double l1_error = 0.0;      // ‖u(., h_min) - f‖_1
    double relative = 0.0;      // divided by ‖f‖_1 (0 for zero data)
};

/// Compares the smallest positive level with f.
TraceRecoveryReport trace_recovery_check(const TruncationExtension& ext);
TraceRecoveryReport trace_recovery_check(const HalfSpaceField& u, const BoundaryGridFunction& f);

struct MultiplicativeReport {
    double lhs = 0.0;     // ‖u(., 0)‖_r^r
    double rhs = 0.0;     // r ‖∇u‖_p ‖u‖_q^{r-1}
    double margin = 0.0;  // (rhs - lhs)/rhs, 0 when both vanish
    bool holds = true;
};

/// Boundary slice from restrict_to_boundary. Requires 1 < p < q < ∞.
MultiplicativeReport multiplicative_trace_inequality(const HalfSpaceField& u, double p, double q);

/// Measure of {x' : u(x', h_min) = 0 != f(x')}.
double collapse_measure(const TruncationExtension& ext);

/// ‖a - b‖_q + ‖∇(a - b)‖_p on a shared grid and level set.
double lifting_distance(const HalfSpaceField& a, const HalfSpaceField& b, double p, double q);

/// E f(., t) = eta(t) (psi_t * f) with the bump mollifier; level 0 holds f.
HalfSpaceField linf_extend(const BoundaryGridFunction& f, std::vector<double> levels);

}  // namespace tracelab
