#include "tracelab/grid.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tracelab/error.hpp"
#include "tracelab/parallel.hpp"

namespace tracelab {

namespace {

std::size_t checked_node_count(int dim, long long axis, std::size_t cap) {
    const long double total = std::pow(static_cast<long double>(axis), dim);
    if (total > static_cast<long double>(cap))
        throw ResourceError("grid would have " + std::to_string(static_cast<double>(total)) +
                            " nodes, cap is " + std::to_string(cap));
    return static_cast<std::size_t>(total);
}

}  // namespace

BoundaryGrid::BoundaryGrid(int dim, double L, double h, std::size_t node_cap)
    : dim_(dim), L_(L), h_(h), m_(0), count_(0), cap_(node_cap) {
    if (dim != 1 && dim != 2) throw DomainError("boundary dimension must be 1 or 2");
    if (!(L > 0.0) || !(h > 0.0) || !std::isfinite(L) || !std::isfinite(h))
        throw DomainError("grid extent and spacing must be positive");
    const double ratio = L / h;
    if (ratio > 1e9) throw ResourceError("grid spacing too small for extent");
    const double m = std::round(ratio);
    if (m < 1.0 || std::fabs(ratio - m) > 1e-9 * std::max(1.0, ratio))
        throw DomainError("L/h must be a positive integer");
    m_ = static_cast<int>(m);
    count_ = checked_node_count(dim, 2LL * m_ + 1, cap_);
}

std::vector<double> BoundaryGrid::weights() const {
    std::vector<double> w(count_);
    for (std::size_t i = 0; i < count_; ++i) w[i] = weight(i);
    return w;
}

BoundaryGrid BoundaryGrid::refine(int factor) const {
    if (factor < 1) throw DomainError("refinement factor must be a positive integer");
    const long long m = static_cast<long long>(m_) * factor;
    if (m > std::numeric_limits<int>::max() / 4) throw ResourceError("refined grid too large");
    checked_node_count(dim_, 2 * m + 1, cap_);
    return BoundaryGrid(dim_, L_, h_ / factor, cap_);
}

BoundaryGridFunction::BoundaryGridFunction(const BoundaryGrid& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
    if (values.size() != grid.node_count())
        throw DomainError("value count does not match grid node count");
}

void validate_levels(std::span<const double> levels) {
    if (levels.empty()) throw DomainError("level set is empty");
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const double x = levels[k];
        if (!std::isfinite(x)) throw DomainError("non-finite level");
        if (x < 0.0 || (x == 0.0 && k != 0)) throw DomainError("levels must be positive (0 allowed first)");
        if (k > 0 && !(x > levels[k - 1])) throw DomainError("levels must be strictly increasing");
    }
}

std::vector<double> geometric_levels(double h_min, double ratio, double x_max, bool include_zero) {
    if (!(h_min > 0.0) || !(ratio > 1.0) || !(x_max >= h_min))
        throw DomainError("geometric levels need h_min > 0, ratio > 1, x_max >= h_min");
    std::vector<double> out;
    if (include_zero) out.push_back(0.0);
    for (int k = 0;; ++k) {
        const double x = h_min * std::pow(ratio, k);
        out.push_back(x);
        if (x >= x_max * (1.0 - 1e-12)) break;
        if (out.size() > 100000) throw ResourceError("too many levels");
    }
    return out;
}

std::vector<double> uniform_levels(double step, int count, bool include_zero) {
    if (!(step > 0.0) || count < 1) throw DomainError("uniform levels need step > 0 and count >= 1");
    std::vector<double> out;
    if (include_zero) out.push_back(0.0);
    for (int k = 1; k <= count; ++k) out.push_back(k * step);
    return out;
}

std::vector<double> level_weights(std::span<const double> levels) {
    validate_levels(levels);
    const std::size_t K = levels.size();
    std::vector<double> w(K, 0.0);
    if (K == 1) {
        w[0] = levels[0];
        return w;
    }
    for (std::size_t k = 0; k + 1 < K; ++k) {
        const double d = 0.5 * (levels[k + 1] - levels[k]);
        w[k] += d;
        w[k + 1] += d;
    }
    if (levels[0] > 0.0) w[0] += levels[0];
    return w;
}

HalfSpaceField::HalfSpaceField(const BoundaryGrid& grid, std::vector<double> levels)
    : grid_(grid), levels_(std::move(levels)) {
    validate_levels(levels_);
    values_.assign(levels_.size() * grid_.node_count(), 0.0);
}

HalfSpaceField::HalfSpaceField(const BoundaryGrid& grid, std::vector<double> levels, std::vector<double> values)
    : grid_(grid), levels_(std::move(levels)), values_(std::move(values)) {
    validate_levels(levels_);
    if (values_.size() != levels_.size() * grid_.node_count())
        throw DomainError("value count does not match grid x levels");
}

BoundaryGridFunction HalfSpaceField::slice_function(std::size_t k) const {
    const auto s = slice(k);
    BoundaryGridFunction out(grid_, std::vector<double>(s.begin(), s.end()));
    out.level = levels_[k];
    return out;
}

BoundaryGridFunction sample_boundary(const BoundaryFunction& f, const BoundaryGrid& grid) {
    BoundaryGridFunction out(grid);
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const auto x = grid.point(i);
        const double v = f(std::span<const double>(x.data(), grid.dim()));
        if (!std::isfinite(v)) throw DomainError("non-finite sample at node " + std::to_string(i));
        out.values[i] = v;
    }
    return out;
}

HalfSpaceField sample_half_space(const HalfSpaceFunction& u, const BoundaryGrid& grid, std::vector<double> levels) {
    HalfSpaceField out(grid, std::move(levels));
    const std::size_t N = grid.node_count();
    for (std::size_t k = 0; k < out.level_count(); ++k) {
        const double xn = out.levels()[k];
        auto s = out.slice(k);
        for (std::size_t i = 0; i < N; ++i) {
            const auto x = grid.point(i);
            const double v = u(std::span<const double>(x.data(), grid.dim()), xn);
            if (!std::isfinite(v)) throw DomainError("non-finite sample at node " + std::to_string(i));
            s[i] = v;
        }
    }
    return out;
}

BoundaryGridFunction restrict_to_boundary(const HalfSpaceField& u) {
    if (u.level_count() == 0) throw DomainError("field has no levels");
    return u.slice_function(0);
}

}  // namespace tracelab
