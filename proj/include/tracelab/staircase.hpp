#pragma once

// Piecewise-linear-in-x_n lifting for p = 1. Smooth approximants f_j of f are
// placed at heights t_j decreasing to 0 and interpolated linearly in between;
// f_0 = 0 sits at the top, u = 0 above it and u = f_J below the last layer.

#include <cstddef>
#include <vector>

#include "tracelab/exponents.hpp"
#include "tracelab/grid.hpp"
#include "tracelab/report.hpp"

namespace tracelab {

struct ApproximantOptions {
    double initial_width = 0.0;   // first mollifier width; 0 means L/4
    double initial_radius = 0.0;  // R_1 / 2; 0 means L/4
    int max_halvings = 60;
    int max_layers = 24;
};

struct ApproximatingSequence {
    BoundaryGridFunction f;
    double f_l1 = 0.0;
    std::vector<BoundaryGridFunction> members;  // f_0 = 0, f_1, ..., f_J
    std::vector<double> errors;                 // e_j = ‖f - f_j‖_1
    std::vector<double> widths;                 // mollifier width used for f_j (0 for f_0)
    std::vector<double> radii;                  // support cutoff radius for f_j (0 for f_0)

    int layers() const noexcept { return static_cast<int>(members.size()) - 1; }
};

/// f_j = mollify(f, delta_j) * eta(|x'| / R_j) with R_j = R_0 2^j; delta_j is
/// halved from delta_{j-1} until e_j <= 2^{-j} ‖f‖_1. Throws ConvergenceError
/// with the achieved error when the halving budget runs out.
ApproximatingSequence build_approximants(const BoundaryGridFunction& f, int J,
                                         const ApproximantOptions& options = {});

struct LayerSchedule {
    Integrability q = Integrability::infinity();
    double data_scale = 0.0;       // ‖f‖_1^q, or ‖f‖_1 for q = ∞
    std::vector<double> gammas;    // gamma_0 .. gamma_J
    std::vector<double> widths;    // s_0 .. s_{J-1}, then the bottom slab t_J
    std::vector<double> heights;   // t_0 .. t_J

    int layers() const noexcept { return static_cast<int>(heights.size()) - 1; }
};

/// Rejects zero data. The tail below t_J repeats f_J, which gives
/// t_J = 2^{-J} F / (1 + 2 gamma_J + F) in closed form.
LayerSchedule build_schedule(const ApproximatingSequence& seq, Integrability q);

struct StaircaseField {
    ApproximatingSequence sequence;
    LayerSchedule schedule;
    HalfSpaceField u;            // samples on the layer heights plus interior points
    int samples_per_strip = 0;

    /// u(node, x_n) evaluated from the construction.
    double evaluate(std::size_t node, double x_n) const;
};

/// Requires q > n/(n-1) (or q = ∞). Every strip gets samples_per_strip interior levels.
StaircaseField staircase_extend(const BoundaryGridFunction& f, Integrability q, int J,
                                const ApproximantOptions& options = {}, int samples_per_strip = 3);

/// Exact average of |a + (b - a) s|^q over s in [0, 1].
double linear_power_mean(double a, double b, double q);

struct StaircaseBounds {
    double lq_power = 0.0;        // ‖u‖_q^q from exact strip integrals
    double lq_bound = 0.0;        // (2^q + 1) ‖f‖_1^q
    double normal_l1 = 0.0;       // ‖∂_n u‖_1 = Σ ‖f_{j+1} - f_j‖_1
    double normal_bound = 0.0;    // 3 ‖f‖_1
    double tangential_l1 = 0.0;   // ‖∇'u‖_1
    double tangential_bound = 0.0;// Σ_j s_j (‖∇'f_j‖_1 + ‖∇'f_{j+1}‖_1) + t_J ‖∇'f_J‖_1
    double tangential_ratio = 0.0;// tangential_l1 / F, recorded constant
    double layer_value_error = 0.0; // max |u(., t_j) - f_j|
    double strip_excess = 0.0;    // max(|u| - |f_j| - |f_{j+1}|) on sampled strip levels
    double linearity_defect = 0.0;// max second difference within strips, relative
    std::vector<double> trace_errors;  // ‖u(., t_j) - f‖_1
    double sup_u = 0.0;
    double sup_f = 0.0;

    std::vector<CheckRow> rows(const StaircaseField& field) const;
};

StaircaseBounds staircase_bounds_check(const StaircaseField& field);

}  // namespace tracelab
