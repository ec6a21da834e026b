#include "tracelab/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "tracelab/error.hpp"
#include "tracelab/parallel.hpp"

namespace tracelab {

namespace {

void require_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) throw DomainError("non-finite value in grid function");
}

void require_exponent(double p) {
    if (!(p >= 1.0)) throw DomainError("Lebesgue exponent must be >= 1");
}

inline double abs_pow(double x, double p) {
    const double a = std::fabs(x);
    if (p == 1.0) return a;
    if (p == 2.0) return a * a;
    return std::pow(a, p);
}

/// ∫ |f|^p over one boundary slice, compensated, in flat order.
double slice_power(const BoundaryGrid& g, std::span<const double> v, double p) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < v.size(); ++i) acc.add(g.weight(i) * abs_pow(v[i], p));
    return acc.value();
}

/// Derivative weights at t of the quadratic through (a, b, c).
std::array<double, 3> lagrange_derivative(double t, double a, double b, double c) {
    return {((t - b) + (t - c)) / ((a - b) * (a - c)),
            ((t - a) + (t - c)) / ((b - a) * (b - c)),
            ((t - a) + (t - b)) / ((c - a) * (c - b))};
}

/// d/dx along a strided line of `count` samples with spacing h.
void line_derivative(const double* in, double* out, std::size_t count, std::size_t stride, double h) {
    const double inv2h = 0.5 / h;
    const std::size_t last = count - 1;
    out[0] = (-3.0 * in[0] + 4.0 * in[stride] - in[2 * stride]) * inv2h;
    for (std::size_t i = 1; i < last; ++i)
        out[i * stride] = (in[(i + 1) * stride] - in[(i - 1) * stride]) * inv2h;
    out[last * stride] = (3.0 * in[last * stride] - 4.0 * in[(last - 1) * stride] + in[(last - 2) * stride]) * inv2h;
}

void tangential_slice(const BoundaryGrid& g, std::span<const double> in, std::span<double> d0, std::span<double> d1) {
    const auto A = static_cast<std::size_t>(g.axis_count());
    const double h = g.spacing();
    if (g.dim() == 1) {
        line_derivative(in.data(), d0.data(), A, 1, h);
        return;
    }
    for (std::size_t i1 = 0; i1 < A; ++i1) line_derivative(in.data() + i1, d0.data() + i1, A, A, h);
    for (std::size_t i0 = 0; i0 < A; ++i0) line_derivative(in.data() + i0 * A, d1.data() + i0 * A, A, 1, h);
}

}  // namespace

double lp_power(const BoundaryGridFunction& f, double p) {
    require_exponent(p);
    if (std::isinf(p)) throw DomainError("lp_power needs a finite exponent");
    require_finite(f.values);
    return slice_power(f.grid, f.values, p);
}

double lp_power(const HalfSpaceField& u, double p) {
    require_exponent(p);
    if (std::isinf(p)) throw DomainError("lp_power needs a finite exponent");
    require_finite(u.values());
    const auto wl = level_weights(u.levels());
    std::vector<double> per_level(u.level_count());
    parallel_for(u.level_count(), [&](std::size_t k) { per_level[k] = wl[k] * slice_power(u.grid(), u.slice(k), p); });
    CompensatedSum acc;
    for (double x : per_level) acc.add(x);
    return acc.value();
}

double lp_norm(const BoundaryGridFunction& f, double p) {
    require_exponent(p);
    require_finite(f.values);
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : f.values) m = std::max(m, std::fabs(x));
        return m;
    }
    return std::pow(lp_power(f, p), 1.0 / p);
}

double lp_norm(const HalfSpaceField& u, double p) {
    require_exponent(p);
    require_finite(u.values());
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : u.values()) m = std::max(m, std::fabs(x));
        return m;
    }
    return std::pow(lp_power(u, p), 1.0 / p);
}

double GradientField::magnitude(std::size_t node, std::size_t k) const {
    const std::size_t idx = k * grid.node_count() + node;
    double s = 0.0;
    for (const auto& c : components) s += c[idx] * c[idx];
    return std::sqrt(s);
}

GradientField discrete_gradient(const HalfSpaceField& u) {
    const auto& g = u.grid();
    if (g.axis_count() < 3) throw DomainError("discrete gradient needs at least 3 nodes per axis");
    if (u.level_count() < 3) throw DomainError("discrete gradient needs at least 3 levels");
    require_finite(u.values());

    const std::size_t N = g.node_count();
    const std::size_t K = u.level_count();
    const auto& x = u.levels();
    const int dim = g.dim();

    GradientField out{g, x, std::vector<std::vector<double>>(dim + 1, std::vector<double>(u.size()))};

    parallel_for(K, [&](std::size_t k) {
        std::span<double> d0(out.components[0].data() + k * N, N);
        std::span<double> d1 = dim == 2 ? std::span<double>(out.components[1].data() + k * N, N) : std::span<double>();
        tangential_slice(g, u.slice(k), d0, d1);

        std::size_t a = k == 0 ? 0 : (k + 1 == K ? K - 3 : k - 1);
        const auto w = lagrange_derivative(x[k], x[a], x[a + 1], x[a + 2]);
        const auto s0 = u.slice(a), s1 = u.slice(a + 1), s2 = u.slice(a + 2);
        double* dn = out.components[dim].data() + k * N;
        for (std::size_t i = 0; i < N; ++i) dn[i] = w[0] * s0[i] + w[1] * s1[i] + w[2] * s2[i];
    });
    return out;
}

double gradient_lp_norm(const GradientField& gf, double p) {
    require_exponent(p);
    const std::size_t N = gf.grid.node_count();
    const std::size_t K = gf.levels.size();
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t i = 0; i < N; ++i) m = std::max(m, gf.magnitude(i, k));
        return m;
    }
    const auto wl = level_weights(gf.levels);
    std::vector<double> per_level(K);
    parallel_for(K, [&](std::size_t k) {
        CompensatedSum acc;
        for (std::size_t i = 0; i < N; ++i) acc.add(gf.grid.weight(i) * abs_pow(gf.magnitude(i, k), p));
        per_level[k] = wl[k] * acc.value();
    });
    CompensatedSum total;
    for (double v : per_level) total.add(v);
    return std::pow(total.value(), 1.0 / p);
}

double component_l1_norm(const GradientField& gf, std::size_t component) {
    if (component >= gf.components.size()) throw DomainError("gradient component out of range");
    const std::size_t N = gf.grid.node_count();
    const auto wl = level_weights(gf.levels);
    CompensatedSum total;
    for (std::size_t k = 0; k < gf.levels.size(); ++k)
        total.add(wl[k] * slice_power(gf.grid, std::span<const double>(gf.components[component].data() + k * N, N), 1.0));
    return total.value();
}

std::vector<std::vector<double>> tangential_gradient(const BoundaryGridFunction& f) {
    const auto& g = f.grid;
    if (g.axis_count() < 3) throw DomainError("tangential gradient needs at least 3 nodes per axis");
    require_finite(f.values);
    std::vector<std::vector<double>> out(g.dim(), std::vector<double>(g.node_count()));
    tangential_slice(g, f.values, out[0], g.dim() == 2 ? std::span<double>(out[1]) : std::span<double>());
    return out;
}

double tangential_gradient_l1(const BoundaryGridFunction& f) {
    const auto d = tangential_gradient(f);
    CompensatedSum acc;
    for (std::size_t i = 0; i < f.grid.node_count(); ++i) {
        double s = 0.0;
        for (const auto& c : d) s += c[i] * c[i];
        acc.add(f.grid.weight(i) * std::sqrt(s));
    }
    return acc.value();
}

void SeminormParams::validate() const {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("seminorm smoothness must lie in (0, 1)");
    if (!(p >= 1.0) || std::isinf(p)) throw DomainError("seminorm exponent must be finite and >= 1");
}

double gagliardo_seminorm(const BoundaryGridFunction& f, const SeminormParams& params, std::size_t node_cap) {
    params.validate();
    require_finite(f.values);
    const auto& g = f.grid;
    const std::size_t N = g.node_count();
    if (N > node_cap)
        throw ResourceError("seminorm grid has " + std::to_string(N) + " nodes, cap is " + std::to_string(node_cap));

    const int dim = g.dim();
    const int m = g.half_count();
    const int A = g.axis_count();
    const int span = 4 * m + 1;
    const double h = g.spacing();
    const double expo = -(dim + params.s * params.p);

    // Kernel by offset, indexed [(d0 + 2m) * span + (d1 + 2m)].
    std::vector<double> kernel(dim == 1 ? span : static_cast<std::size_t>(span) * span, 0.0);
    for (int d0 = -2 * m; d0 <= 2 * m; ++d0) {
        if (dim == 1) {
            if (d0 != 0) kernel[d0 + 2 * m] = std::pow(std::abs(d0) * h, expo);
            continue;
        }
        for (int d1 = -2 * m; d1 <= 2 * m; ++d1) {
            if (d0 == 0 && d1 == 0) continue;
            const double r = h * std::sqrt(static_cast<double>(d0) * d0 + static_cast<double>(d1) * d1);
            kernel[static_cast<std::size_t>(d0 + 2 * m) * span + (d1 + 2 * m)] = std::pow(r, expo);
        }
    }

    const auto w = g.weights();
    const double p = params.p;
    const auto& v = f.values;
    std::vector<double> rows(N);

    parallel_for(N, [&](std::size_t i) {
        const auto ii = g.axis_indices(i);
        const double fi = v[i];
        CompensatedSum acc;
        if (dim == 1) {
            const double* kr = kernel.data() + (ii[0] + 2 * m);
            for (int j = 0; j < A; ++j) {
                if (j == ii[0]) continue;
                acc.add(abs_pow(fi - v[j], p) * w[j] * kr[-j]);
            }
        } else {
            for (int j0 = 0; j0 < A; ++j0) {
                const double* kr = kernel.data() + static_cast<std::size_t>(ii[0] - j0 + 2 * m) * span + (ii[1] + 2 * m);
                const std::size_t base = static_cast<std::size_t>(j0) * A;
                for (int j1 = 0; j1 < A; ++j1) {
                    if (j0 == ii[0] && j1 == ii[1]) continue;
                    acc.add(abs_pow(fi - v[base + j1], p) * w[base + j1] * kr[-j1]);
                }
            }
        }
        rows[i] = w[i] * acc.value();
    });

    const double total = pairwise_sum(rows);
    return std::pow(std::max(total, 0.0), 1.0 / p);
}

double intersection_norm(const BoundaryGridFunction& f, double s, double p, double r, std::size_t node_cap) {
    return gagliardo_seminorm(f, SeminormParams{s, p}, node_cap) + lp_norm(f, r);
}

}  // namespace tracelab
