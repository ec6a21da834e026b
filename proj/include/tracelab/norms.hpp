#pragma once

// Discrete Lebesgue norms, finite-difference gradients and the fractional
// Gagliardo seminorm on boundary grids.

#include <cstddef>
#include <limits>
#include <vector>

#include "tracelab/grid.hpp"

namespace tracelab {

inline constexpr double inf_exponent = std::numeric_limits<double>::infinity();

/// Trapezoid quadrature of |u|^p; p in [1, ∞) (no root taken).
double lp_power(const BoundaryGridFunction& f, double p);
double lp_power(const HalfSpaceField& u, double p);

/// (∫ |u|^p)^{1/p}; p = inf_exponent gives max |u|. Rejects non-finite input.
double lp_norm(const BoundaryGridFunction& f, double p);
double lp_norm(const HalfSpaceField& u, double p);

/// Gradient of a half-space field: components 0..dim-1 tangential, last one
/// normal, each laid out like the field. Second-order central differences in
/// x', second-order one-sided stencils at the faces, three-point nonuniform
/// stencils in x_n.
struct GradientField {
    BoundaryGrid grid;
    std::vector<double> levels;
    std::vector<std::vector<double>> components;

    /// Euclidean length of the gradient at (node, level).
    double magnitude(std::size_t node, std::size_t k) const;
};

/// Requires at least 3 nodes per axis and at least 3 levels.
GradientField discrete_gradient(const HalfSpaceField& u);

/// (∫ |∇u|^p)^{1/p} with the Euclidean norm of the gradient vector.
double gradient_lp_norm(const GradientField& g, double p);
/// ∫ |∂_k u| for one component.
double component_l1_norm(const GradientField& g, std::size_t component);

/// Tangential gradient of a boundary function, one vector per axis.
std::vector<std::vector<double>> tangential_gradient(const BoundaryGridFunction& f);
/// ∫ |∇'f| with the Euclidean norm.
double tangential_gradient_l1(const BoundaryGridFunction& f);

struct SeminormParams {
    double s;
    double p;
    /// Throws DomainError unless 0 < s < 1, p >= 1.
    void validate() const;
};

inline constexpr std::size_t default_seminorm_node_cap = 4096;

/// (Σ_{i≠j} |f_i − f_j|^p w_i w_j / |x_i − x_j|^{dim + s p})^{1/p}.
/// Throws ResourceError when the grid has more than node_cap nodes.
double gagliardo_seminorm(const BoundaryGridFunction& f, const SeminormParams& params,
                          std::size_t node_cap = default_seminorm_node_cap);

/// gagliardo_seminorm(f, s, p) + lp_norm(f, r).
double intersection_norm(const BoundaryGridFunction& f, double s, double p, double r,
                         std::size_t node_cap = default_seminorm_node_cap);

}  // namespace tracelab
