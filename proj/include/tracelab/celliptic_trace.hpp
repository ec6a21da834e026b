#pragma once

// Boundary values through local kernel projections: near the boundary u is
// replaced by η_j Σ_i φ_{j,i} Π_{Q'_{j,i}} u, whose restriction to x_n = 0
// converges in L^1 to the trace as j grows.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tracelab/celliptic_cover.hpp"
#include "tracelab/celliptic_operator.hpp"

namespace tracelab {

struct TraceIterate {
    int j = 0;
    std::size_t cube_count = 0;     // shifted cubes projected at this level
    std::size_t dropped = 0;        // needed cubes whose shifted copy left the sampled region
    double l1_increment = 0.0;      // ‖T_j - T_{j-1}‖_1 on the boundary, NaN for the first level
    double l1_trace_norm = 0.0;     // ‖T_j(., 0)‖_1
    double linf_ratio = 0.0;        // sup_{strip} |T_j u| / sup |u|
    double l1_error = 0.0;          // ‖T_j(., 0) - u(., 0)‖_1
    double min_coverage = 1.0;      // min over boundary nodes of Σ kept φ
    std::vector<BoundaryGridFunction> trace;  // N components at x_n = 0
};

struct TraceRun {
    DiffOperator op;
    std::vector<TraceIterate> iterates;
    double boundary_l1 = 0.0;       // ‖u(., 0)‖_1

    const TraceIterate& last() const { return iterates.back(); }
};

struct ReplacementOptions {
    int j_min = 0;
    int degree_cap = 4;
    bool strip_sup = true;          // evaluate T_j on the strip for linf_ratio
};

/// u needs a level 0 (for the comparison) and uniform enough sampling that
/// each kept shifted cube holds 2m+1 nodes per axis.
TraceRun replacement_trace(const FieldComponents& u, const DiffOperator& op, int j_max,
                           const ReplacementOptions& options = {});

/// T_j^{(1)} u = (1 - η_j) u.
FieldComponents interior_part(const FieldComponents& u, int j);

/// Pointwise |Au| by finite differences, integrated: ‖Au‖_1.
double operator_l1(const FieldComponents& u, const DiffOperator& op);

struct TraceBounds {
    double l1_constant = 0.0;       // ‖trace‖_1 / ‖Au‖_1
    double linf_max = 0.0;          // max_j linf_ratio
    double linf_min = 0.0;          // min_j linf_ratio
};

TraceBounds trace_bounds_check(const TraceRun& run, const FieldComponents& u);

/// max over random kernel elements of max(a/b, b/a), a = avg_{Q'}|π|,
/// b = avg_{3Q}|π|, by tensor Gauss-Legendre quadrature.
double norm_equivalence_constant(const PolyKernelBasis& basis, const Cube& Q, std::size_t samples = 64,
                                 std::uint64_t seed = 3);

/// max over random smooth fields of ‖Π_Q u‖_∞ / avg_Q |u| on the grid nodes
/// of Q. Fields are drawn in the local coordinates of Q, so the constant is
/// comparable across cube sizes.
double inverse_estimate_constant(const PolyKernelBasis& basis, const BoundaryGrid& grid,
                                 const std::vector<double>& levels, std::size_t samples = 16,
                                 std::uint64_t seed = 5);

}  // namespace tracelab
