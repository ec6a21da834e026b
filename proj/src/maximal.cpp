#include "tracelab/maximal.hpp"

#include <algorithm>
#include <cmath>

#include "tracelab/error.hpp"
#include "tracelab/parallel.hpp"

namespace tracelab {

RadiusLadder RadiusLadder::standard(const BoundaryGrid& grid) {
    RadiusLadder out;
    const int top = 2 * grid.half_count();
    out.radii.reserve(top);
    for (int k = 1; k <= top; ++k) out.radii.push_back(k * grid.spacing());
    return out;
}

RadiusLadder RadiusLadder::refined(const BoundaryGrid& grid, int k) {
    if (k < 1) throw DomainError("ladder refinement must be a positive integer");
    RadiusLadder out;
    const int top = 2 * grid.half_count() * k;
    for (int i = k; i <= top; ++i) out.radii.push_back(i * grid.spacing() / k);
    return out;
}

void RadiusLadder::validate(const BoundaryGrid& grid) const {
    if (radii.empty()) throw DomainError("radius ladder is empty");
    const double h = grid.spacing();
    const double diameter = 2.0 * grid.extent() * std::sqrt(static_cast<double>(grid.dim()));
    if (radii.front() < h * (1.0 - 1e-12)) throw DomainError("smallest radius must be >= h");
    if (radii.back() > diameter * (1.0 + 1e-12)) throw DomainError("largest radius exceeds the domain diameter");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1])) throw DomainError("radii must be strictly increasing");
}

namespace {

struct Offset {
    int d0;
    int d1;
    long long dist2;  // in units of h^2
};

}  // namespace

BoundaryGridFunction maximal_function(const BoundaryGridFunction& f, const RadiusLadder& ladder) {
    const auto& g = f.grid;
    ladder.validate(g);
    for (double x : f.values)
        if (!std::isfinite(x)) throw DomainError("non-finite value in grid function");

    const int dim = g.dim();
    const int A = g.axis_count();
    const double h = g.spacing();
    const double r_max = ladder.radii.back();
    const int reach = std::min(2 * g.half_count(), static_cast<int>(std::ceil(r_max / h)));

    // Radii compared in units of h^2 so the ball test is exact integer arithmetic:
    // node at offset d is inside the ball of radius r iff |d|^2 < (r/h)^2.
    std::vector<double> thresholds(ladder.radii.size());
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        const double t = ladder.radii[i] / h;
        thresholds[i] = t * t * (1.0 - 1e-12);
    }

    std::vector<Offset> offsets;
    for (int d0 = -reach; d0 <= reach; ++d0) {
        const int lo = dim == 2 ? -reach : 0;
        const int hi = dim == 2 ? reach : 0;
        for (int d1 = lo; d1 <= hi; ++d1) {
            const long long q = 1LL * d0 * d0 + 1LL * d1 * d1;
            if (static_cast<double>(q) < thresholds.back()) offsets.push_back({d0, d1, q});
        }
    }
    std::stable_sort(offsets.begin(), offsets.end(),
                     [](const Offset& a, const Offset& b) { return a.dist2 < b.dist2; });

    std::vector<double> absf(f.values.size());
    for (std::size_t i = 0; i < absf.size(); ++i) absf[i] = std::fabs(f.values[i]);

    BoundaryGridFunction out(g);
    parallel_for(g.node_count(), [&](std::size_t node) {
        const auto ix = g.axis_indices(node);
        double sum = 0.0;
        long long count = 0;
        double best = 0.0;
        std::size_t rung = 0;
        const std::size_t R = thresholds.size();
        for (const auto& o : offsets) {
            while (rung < R && !(static_cast<double>(o.dist2) < thresholds[rung])) {
                if (count > 0) best = std::max(best, sum / count);
                ++rung;
            }
            if (rung == R) break;
            const int j0 = ix[0] + o.d0;
            const int j1 = ix[1] + o.d1;
            if (j0 < 0 || j0 >= A || (dim == 2 && (j1 < 0 || j1 >= A))) continue;
            sum += absf[g.flat_index(j0, j1)];
            ++count;
        }
        if (rung < R && count > 0) best = std::max(best, sum / count);
        out.values[node] = best;
    });
    return out;
}

}  // namespace tracelab
