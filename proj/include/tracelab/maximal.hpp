#pragma once

// Discrete centered Hardy-Littlewood maximal function.
//
// Balls are open Euclidean balls {y : |x - y| < r} intersected with the node
// set, and averages divide by the number of included nodes. With r = h the
// ball is the node itself, so Mf >= |f| holds exactly.

#include <vector>

#include "tracelab/grid.hpp"

namespace tracelab {

struct RadiusLadder {
    std::vector<double> radii;

    /// h, 2h, ..., 2L.
    static RadiusLadder standard(const BoundaryGrid& grid);
    /// h, h + h/k, h + 2h/k, ..., 2L.
    static RadiusLadder refined(const BoundaryGrid& grid, int k);
    /// Throws DomainError unless radii are positive, strictly increasing, first >= h
    /// and last <= the diameter of the truncated domain.
    void validate(const BoundaryGrid& grid) const;
};

/// max over r in the ladder of the average of |f| over the discrete ball.
/// Throws DomainError on an empty or invalid ladder.
BoundaryGridFunction maximal_function(const BoundaryGridFunction& f, const RadiusLadder& ladder);
inline BoundaryGridFunction maximal_function(const BoundaryGridFunction& f) {
    return maximal_function(f, RadiusLadder::standard(f.grid));
}

}  // namespace tracelab
