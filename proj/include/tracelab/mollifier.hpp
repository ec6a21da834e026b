#pragma once

// Discrete mollification on boundary grids with the bump (1 - |x|^2)^3 on the
// unit ball, dilated to radius delta. Weights are renormalized over the
// in-grid stencil, so the result is a convex average of nearby samples and is
// clamped to their range: max |mollify(f)| <= max |f| holds exactly.

#include "tracelab/grid.hpp"

namespace tracelab {

/// Profile on [0, ∞): (1 - t^2)^3 for t < 1, else 0 (t = |x| / delta).
double bump_profile(double t) noexcept;

/// delta <= h returns f unchanged. Throws DomainError for delta < 0.
BoundaryGridFunction mollify(const BoundaryGridFunction& f, double delta);

}  // namespace tracelab
