#include "tracelab/mollifier.hpp"

#include <algorithm>
#include <cmath>

#include "tracelab/error.hpp"
#include "tracelab/parallel.hpp"

namespace tracelab {

double bump_profile(double t) noexcept {
    if (!(t < 1.0)) return 0.0;
    const double u = 1.0 - t * t;
    return u * u * u;
}

BoundaryGridFunction mollify(const BoundaryGridFunction& f, double delta) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("mollifier width must be finite and >= 0");
    const auto& g = f.grid;
    const double h = g.spacing();
    if (delta <= h) return f;

    const int dim = g.dim();
    const int A = g.axis_count();
    const int reach = std::min(2 * g.half_count(), static_cast<int>(std::ceil(delta / h)));

    struct Tap {
        int d0, d1;
        double w;
    };
    std::vector<Tap> taps;
    for (int d0 = -reach; d0 <= reach; ++d0)
        for (int d1 = (dim == 2 ? -reach : 0); d1 <= (dim == 2 ? reach : 0); ++d1) {
            const double w = bump_profile(h * std::hypot(d0, d1) / delta);
            if (w > 0.0) taps.push_back({d0, d1, w});
        }

    BoundaryGridFunction out(g);
    parallel_for(g.node_count(), [&](std::size_t node) {
        const auto ix = g.axis_indices(node);
        double num = 0.0, den = 0.0;
        double lo = f.values[node], hi = lo;
        for (const auto& t : taps) {
            const int j0 = ix[0] + t.d0, j1 = ix[1] + t.d1;
            if (j0 < 0 || j0 >= A || (dim == 2 && (j1 < 0 || j1 >= A))) continue;
            const double v = f.values[g.flat_index(j0, j1)];
            num += t.w * v;
            den += t.w;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        out.values[node] = std::clamp(num / den, lo, hi);
    });
    return out;
}

}  // namespace tracelab
