#pragma once

// Uniform tensor grids on the boundary [-L, L]^dim (dim = n - 1 in {1, 2}) and
// half-space fields sampled on grid x levels.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace tracelab {

inline constexpr std::size_t default_node_cap = std::size_t{1} << 22;

class BoundaryGrid {
public:
    /// Requires dim in {1, 2}, L > 0, h > 0, L/h an integer (to 1e-9 relative).
    BoundaryGrid(int dim, double L, double h, std::size_t node_cap = default_node_cap);

    int dim() const noexcept { return dim_; }
    int ambient_dim() const noexcept { return dim_ + 1; }
    double extent() const noexcept { return L_; }
    double spacing() const noexcept { return h_; }
    /// m = L/h; axis indices run over [0, 2m].
    int half_count() const noexcept { return m_; }
    int axis_count() const noexcept { return 2 * m_ + 1; }
    std::size_t node_count() const noexcept { return count_; }
    std::size_t node_cap() const noexcept { return cap_; }

    double coordinate(int axis_index) const noexcept { return (axis_index - m_) * h_; }
    /// 1-D trapezoid weight on an axis: h inside, h/2 at the two ends.
    double axis_weight(int axis_index) const noexcept {
        return (axis_index == 0 || axis_index == 2 * m_) ? 0.5 * h_ : h_;
    }

    /// Flat index = i0 * axis_count + i1 (dim 2), i0 (dim 1).
    std::array<int, 2> axis_indices(std::size_t flat) const noexcept {
        if (dim_ == 1) return {static_cast<int>(flat), 0};
        const auto c = static_cast<std::size_t>(axis_count());
        return {static_cast<int>(flat / c), static_cast<int>(flat % c)};
    }
    std::size_t flat_index(int i0, int i1 = 0) const noexcept {
        return dim_ == 1 ? static_cast<std::size_t>(i0)
                         : static_cast<std::size_t>(i0) * axis_count() + i1;
    }
    /// Node coordinates; unused trailing entries are zero.
    std::array<double, 2> point(std::size_t flat) const noexcept {
        const auto ix = axis_indices(flat);
        return {coordinate(ix[0]), dim_ == 2 ? coordinate(ix[1]) : 0.0};
    }
    double weight(std::size_t flat) const noexcept {
        const auto ix = axis_indices(flat);
        return dim_ == 1 ? axis_weight(ix[0]) : axis_weight(ix[0]) * axis_weight(ix[1]);
    }
    /// All product trapezoid weights in flat order.
    std::vector<double> weights() const;

    /// Same extent, spacing h/factor. Throws ResourceError past the node cap.
    BoundaryGrid refine(int factor) const;
    BoundaryGrid with_node_cap(std::size_t cap) const { return BoundaryGrid(dim_, L_, h_, cap); }

    friend bool operator==(const BoundaryGrid& a, const BoundaryGrid& b) noexcept {
        return a.dim_ == b.dim_ && a.m_ == b.m_ && a.L_ == b.L_ && a.h_ == b.h_;
    }

private:
    int dim_;
    double L_;
    double h_;
    int m_;
    std::size_t count_;
    std::size_t cap_;
};

/// Samples on a boundary grid. `level` records the x_n slice the samples
/// came from when produced by restriction (absent for direct samples).
struct BoundaryGridFunction {
    BoundaryGrid grid;
    std::vector<double> values;
    std::optional<double> level;

    explicit BoundaryGridFunction(const BoundaryGrid& g, double fill = 0.0)
        : grid(g), values(g.node_count(), fill) {}
    BoundaryGridFunction(const BoundaryGrid& g, std::vector<double> v);

    std::span<const double> span() const noexcept { return values; }
    double operator[](std::size_t i) const noexcept { return values[i]; }
    double& operator[](std::size_t i) noexcept { return values[i]; }
};

/// Strictly increasing levels, positive except for an optional leading 0.
/// Throws DomainError otherwise.
void validate_levels(std::span<const double> levels);

/// h_min * ratio^k up to and including the first level >= x_max.
std::vector<double> geometric_levels(double h_min, double ratio, double x_max, bool include_zero = false);
/// step, 2 step, ..., count * step.
std::vector<double> uniform_levels(double step, int count, bool include_zero = false);

/// Trapezoid weights in x_n over the levels. Without a 0 level the first
/// slice is extended as a constant down to x_n = 0.
std::vector<double> level_weights(std::span<const double> levels);

/// Samples on grid x levels, stored level-major.
class HalfSpaceField {
public:
    HalfSpaceField(const BoundaryGrid& grid, std::vector<double> levels);
    HalfSpaceField(const BoundaryGrid& grid, std::vector<double> levels, std::vector<double> values);

    const BoundaryGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& levels() const noexcept { return levels_; }
    std::size_t level_count() const noexcept { return levels_.size(); }
    std::size_t size() const noexcept { return values_.size(); }
    bool has_zero_level() const noexcept { return !levels_.empty() && levels_.front() == 0.0; }

    std::span<const double> slice(std::size_t k) const noexcept {
        return {values_.data() + k * grid_.node_count(), grid_.node_count()};
    }
    std::span<double> slice(std::size_t k) noexcept {
        return {values_.data() + k * grid_.node_count(), grid_.node_count()};
    }
    BoundaryGridFunction slice_function(std::size_t k) const;

    double at(std::size_t node, std::size_t k) const noexcept { return values_[k * grid_.node_count() + node]; }
    double& at(std::size_t node, std::size_t k) noexcept { return values_[k * grid_.node_count() + node]; }

    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }

private:
    BoundaryGrid grid_;
    std::vector<double> levels_;
    std::vector<double> values_;
};

using BoundaryFunction = std::function<double(std::span<const double> x_prime)>;
using HalfSpaceFunction = std::function<double(std::span<const double> x_prime, double x_n)>;

/// Throws DomainError on a non-finite sample.
BoundaryGridFunction sample_boundary(const BoundaryFunction& f, const BoundaryGrid& grid);
HalfSpaceField sample_half_space(const HalfSpaceFunction& u, const BoundaryGrid& grid,
                                 std::vector<double> levels);

/// Slice at x_n = 0 if present, else at the smallest level (recorded in `level`).
BoundaryGridFunction restrict_to_boundary(const HalfSpaceField& u);

}  // namespace tracelab
