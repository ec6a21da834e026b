#include "tracelab/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tracelab/error.hpp"
#include "tracelab/norms.hpp"
#include "tracelab/parallel.hpp"

namespace tracelab {

double poisson_constant(int n) {
    if (n < 2) throw DomainError("Poisson kernel needs n >= 2");
    return std::tgamma(0.5 * n) / std::pow(std::numbers::pi, 0.5 * n);
}

double poisson_kernel(std::span<const double> x_prime, double x_n) {
    if (!(x_n > 0.0)) throw DomainError("Poisson kernel needs x_n > 0");
    const int n = static_cast<int>(x_prime.size()) + 1;
    double r2 = x_n * x_n;
    for (double c : x_prime) r2 += c * c;
    return poisson_constant(n) * x_n / std::pow(r2, 0.5 * n);
}

double poisson_window_mass(int dim, double a, double t) {
    if (!(t > 0.0) || !(a > 0.0)) throw DomainError("window mass needs a > 0, t > 0");
    if (dim == 1) return (2.0 / std::numbers::pi) * std::atan(a / t);
    if (dim == 2) return (2.0 / std::numbers::pi) * std::atan(a * a / (t * std::sqrt(t * t + 2.0 * a * a)));
    throw DomainError("window mass implemented for dim 1 and 2");
}

namespace {

/// Unscaled kernel values K(d h, t) over the offset window, indexed
/// [(d0 + 2m) * span + (d1 + 2m)].
std::vector<double> kernel_table(const BoundaryGrid& g, double t) {
    const int m = g.half_count();
    const int span = 4 * m + 1;
    const int n = g.ambient_dim();
    const double c = poisson_constant(n);
    const double h = g.spacing();
    std::vector<double> table(g.dim() == 1 ? span : static_cast<std::size_t>(span) * span);
    for (int d0 = -2 * m; d0 <= 2 * m; ++d0) {
        if (g.dim() == 1) {
            const double x = d0 * h;
            table[d0 + 2 * m] = c * t / (t * t + x * x);
            continue;
        }
        for (int d1 = -2 * m; d1 <= 2 * m; ++d1) {
            const double r2 = t * t + h * h * (1.0 * d0 * d0 + 1.0 * d1 * d1);
            table[static_cast<std::size_t>(d0 + 2 * m) * span + (d1 + 2 * m)] = c * t / (r2 * std::sqrt(r2));
        }
    }
    return table;
}

double table_mass(const BoundaryGrid& g, const std::vector<double>& table) {
    CompensatedSum acc;
    for (double x : table) acc.add(x);
    return acc.value() * std::pow(g.spacing(), g.dim());
}

}  // namespace

double poisson_lattice_mass(const BoundaryGrid& grid, double t) {
    if (!(t > 0.0)) throw DomainError("Poisson kernel needs x_n > 0");
    return table_mass(grid, kernel_table(grid, t));
}

HalfSpaceField poisson_extend(const BoundaryGridFunction& f, std::vector<double> levels) {
    for (double x : levels)
        if (x < 0.0) throw DomainError("Poisson extension levels must be >= 0");
    for (double x : f.values)
        if (!std::isfinite(x)) throw DomainError("non-finite boundary data");

    HalfSpaceField v(f.grid, std::move(levels));
    const auto& g = f.grid;
    const int dim = g.dim();
    const int m = g.half_count();
    const int A = g.axis_count();
    const int span = 4 * m + 1;
    const std::size_t N = g.node_count();
    const double a = 2.0 * g.extent() + 0.5 * g.spacing();

    // Data premultiplied by the trapezoid weights, and a per-row nonzero mask.
    std::vector<double> data(N);
    for (std::size_t i = 0; i < N; ++i) data[i] = g.weight(i) * f.values[i];
    const int rows = dim == 1 ? 1 : A;
    const int row_len = A;
    std::vector<char> row_live(rows, 0);
    for (int r = 0; r < rows; ++r)
        for (int j = 0; j < row_len; ++j)
            if (data[static_cast<std::size_t>(r) * row_len + j] != 0.0) {
                row_live[r] = 1;
                break;
            }

    std::vector<std::vector<double>> tables(v.level_count());
    for (std::size_t k = 0; k < v.level_count(); ++k) {
        const double t = v.levels()[k];
        if (t == 0.0) continue;
        auto table = kernel_table(g, t);
        const double scale = poisson_window_mass(dim, a, t) / table_mass(g, table);
        for (double& x : table) x *= scale;
        tables[k] = std::move(table);
    }

    const std::size_t out_rows = dim == 1 ? 1 : static_cast<std::size_t>(A);
    parallel_for(v.level_count() * out_rows, [&](std::size_t task) {
        const std::size_t k = task / out_rows;
        const int i0 = static_cast<int>(task % out_rows);
        auto out = v.slice(k);
        if (v.levels()[k] == 0.0) {
            for (int i = 0; i < row_len; ++i) {
                const std::size_t idx = static_cast<std::size_t>(i0) * row_len + i;
                out[idx] = f.values[idx];
            }
            return;
        }
        const auto& T = tables[k];
        if (dim == 1) {
            for (int i = 0; i < A; ++i) {
                // T is even, so T(i - j) = T(j - i), contiguous in j.
                const double* trow = T.data() + (2 * m - i);
                double acc = 0.0;
                for (int j = 0; j < A; ++j) acc += trow[j] * data[j];
                out[i] = acc;
            }
            return;
        }
        std::vector<double> acc(A, 0.0);
        for (int j0 = 0; j0 < A; ++j0) {
            if (!row_live[j0]) continue;
            const double* trow = T.data() + static_cast<std::size_t>(i0 - j0 + 2 * m) * span;
            const double* drow = data.data() + static_cast<std::size_t>(j0) * A;
            for (int i1 = 0; i1 < A; ++i1) {
                const double* tr = trow + (2 * m - i1);
                double s = 0.0;
                for (int j1 = 0; j1 < A; ++j1) s += tr[j1] * drow[j1];
                acc[i1] += s;
            }
        }
        for (int i1 = 0; i1 < A; ++i1) out[static_cast<std::size_t>(i0) * A + i1] = acc[i1];
    });
    return v;
}

DominationReport check_maximal_domination(const HalfSpaceField& v, const BoundaryGridFunction& maximal, double tol) {
    if (!(v.grid() == maximal.grid)) throw DomainError("field and maximal function live on different grids");
    DominationReport rep;
    rep.tol = tol;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    const std::size_t N = v.grid().node_count();
    for (std::size_t k = 0; k < v.level_count(); ++k) {
        const auto s = v.slice(k);
        for (std::size_t i = 0; i < N; ++i) {
            const double d = std::fabs(s[i]) - maximal.values[i];
            if (d > rep.max_violation) {
                rep.max_violation = d;
                rep.node = i;
                rep.level = k;
            }
            if (d > tol) ++rep.violations;
        }
    }
    return rep;
}

DominationReport check_maximal_domination(const HalfSpaceField& v, const BoundaryGridFunction& f,
                                          const RadiusLadder& ladder, double tol) {
    return check_maximal_domination(v, maximal_function(f, ladder), tol);
}

BoundaryGridFunction vertical_maximal(const HalfSpaceField& v) {
    BoundaryGridFunction out(v.grid());
    for (std::size_t k = 0; k < v.level_count(); ++k) {
        const auto s = v.slice(k);
        for (std::size_t i = 0; i < s.size(); ++i) out.values[i] = std::max(out.values[i], std::fabs(s[i]));
    }
    return out;
}

bool GrowthTable::strictly_increasing() const {
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].strip_norm > rows[i - 1].strip_norm)) return false;
    return !rows.empty();
}

double GrowthTable::last_over_first() const {
    if (rows.empty() || rows.front().strip_norm == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return rows.back().strip_norm / rows.front().strip_norm;
}

GrowthTable strip_growth(const HalfSpaceField& v, double p, std::span<const double> heights) {
    if (!(p >= 1.0) || std::isinf(p)) throw DomainError("strip norm exponent must be finite and >= 1");
    const auto& lv = v.levels();
    const auto& g = v.grid();

    std::vector<double> slice_power(v.level_count());
    parallel_for(v.level_count(), [&](std::size_t k) {
        CompensatedSum acc;
        const auto s = v.slice(k);
        for (std::size_t i = 0; i < s.size(); ++i) acc.add(g.weight(i) * std::pow(std::fabs(s[i]), p));
        slice_power[k] = acc.value();
    });

    GrowthTable table;
    double prev_H = 0.0;
    for (double H : heights) {
        if (!(H > prev_H)) throw DomainError("heights must be positive and strictly increasing");
        prev_H = H;
        auto it = std::find_if(lv.begin(), lv.end(), [&](double x) { return std::fabs(x - H) <= 1e-12 * H; });
        if (it == lv.end()) throw DomainError("height " + std::to_string(H) + " is not a level of the field");
        const std::size_t count = static_cast<std::size_t>(it - lv.begin()) + 1;
        const auto w = level_weights(std::span<const double>(lv.data(), count));
        CompensatedSum acc;
        for (std::size_t k = 0; k < count; ++k) acc.add(w[k] * slice_power[k]);
        GrowthRow row;
        row.H = H;
        row.strip_norm = std::pow(acc.value(), 1.0 / p);
        row.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
        if (!table.rows.empty()) {
            const auto& last = table.rows.back();
            row.fitted_exponent = std::log(row.strip_norm / last.strip_norm) / std::log(H / last.H);
        }
        table.rows.push_back(row);
    }

    if (table.rows.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(table.rows.size());
        for (const auto& r : table.rows) {
            const double x = std::log(r.H), y = std::log(r.strip_norm);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        table.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    } else {
        table.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
    }
    return table;
}

BoundaryGridFunction divergence_data(const BoundaryGrid& grid, double alpha, DivergenceData kind) {
    if (kind == DivergenceData::power_decay)
        return sample_boundary(
            [alpha](std::span<const double> x) {
                double r2 = 0.0;
                for (double c : x) r2 += c * c;
                return std::pow(1.0 + std::sqrt(r2), -alpha);
            },
            grid);
    return sample_boundary(
        [](std::span<const double> x) {
            double r2 = 0.0;
            for (double c : x) r2 += c * c;
            if (r2 >= 1.0) return 0.0;
            const double u = 1.0 - r2;
            return x[0] * u * u * u;
        },
        grid);
}

GrowthTable divergence_experiment(double alpha, double p, int n, std::span<const double> heights,
                                  const DivergenceSetup& setup) {
    if (n != 2 && n != 3) throw DomainError("divergence experiment supports n in {2, 3}");
    if (!(p >= 1.0) || std::isinf(p)) throw DomainError("divergence experiment needs finite p >= 1");
    if (!(alpha > (n - 1.0) / p && alpha <= n / p))
        throw DomainError("alpha must satisfy (n-1)/p < alpha <= n/p");
    if (heights.empty()) throw DomainError("no heights given");
    if (setup.levels_per_octave < 1 || !(setup.level_min > 0.0)) throw DomainError("bad level schedule");

    const BoundaryGrid grid(n - 1, setup.L, setup.h);
    const auto f = divergence_data(grid, alpha, setup.data);

    const double top = *std::max_element(heights.begin(), heights.end());
    std::vector<double> levels{0.0};
    for (int k = 0;; ++k) {
        const double x = setup.level_min * std::exp2(static_cast<double>(k) / setup.levels_per_octave);
        if (x > top * (1.0 + 1e-12)) break;
        levels.push_back(x);
    }
    for (double H : heights) levels.push_back(H);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end(),
                             [](double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(a, b); }),
                 levels.end());

    const auto v = poisson_extend(f, levels);
    return strip_growth(v, p, heights);
}

}  // namespace tracelab
