#include "tracelab/celliptic_trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "tracelab/error.hpp"
#include "tracelab/norms.hpp"
#include "tracelab/parallel.hpp"

namespace tracelab {

namespace {

void validate_field(const FieldComponents& u, const DiffOperator& op) {
    op.validate();
    if (static_cast<int>(u.size()) != op.N) throw DomainError("field has the wrong number of components");
    for (const auto& c : u)
        if (!(c.grid() == u.front().grid()) || c.levels() != u.front().levels())
            throw DomainError("field components live on different grids");
    if (u.front().grid().ambient_dim() != op.n) throw DomainError("field dimension does not match the operator");
}

double euclid(const double* v, int N) {
    double s = 0.0;
    for (int c = 0; c < N; ++c) s += v[c] * v[c];
    return std::sqrt(s);
}

bool inside_region(const Cube& q, const BoundaryGrid& g, double top) {
    const double slack = 1e-9 * g.spacing();
    for (int k = 0; k < q.n - 1; ++k)
        if (q.lo(k) < -g.extent() - slack || q.hi(k) > g.extent() + slack) return false;
    return q.lo(q.n - 1) >= -slack && q.hi(q.n - 1) <= top + slack;
}

double boundary_l1(const std::vector<BoundaryGridFunction>& f) {
    const auto& g = f.front().grid;
    CompensatedSum acc;
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        for (std::size_t c = 0; c < f.size(); ++c) v[c] = f[c].values[i];
        acc.add(g.weight(i) * euclid(v.data(), static_cast<int>(v.size())));
    }
    return acc.value();
}

std::vector<BoundaryGridFunction> difference(const std::vector<BoundaryGridFunction>& a,
                                             const std::vector<BoundaryGridFunction>& b) {
    auto out = a;
    for (std::size_t c = 0; c < a.size(); ++c)
        for (std::size_t i = 0; i < a[c].values.size(); ++i) out[c].values[i] = a[c].values[i] - b[c].values[i];
    return out;
}

}  // namespace

TraceRun replacement_trace(const FieldComponents& u, const DiffOperator& op, int j_max,
                           const ReplacementOptions& options) {
    validate_field(u, op);
    if (options.j_min < 0 || j_max < options.j_min) throw DomainError("bad level range");
    const auto& g = u.front().grid();
    const auto& levels = u.front().levels();
    if (!u.front().has_zero_level()) throw DomainError("replacement trace needs the level x_n = 0 for comparison");
    const int n = op.n;
    const int N = op.N;
    const int dim = n - 1;
    const double top = levels.back();
    const std::size_t nodes = g.node_count();

    Cube reference{n, {0.0, 0.0, 0.0}, 2.0};
    const auto basis0 = kernel_basis(op, reference, options.degree_cap);

    TraceRun run;
    run.op = op;
    std::vector<BoundaryGridFunction> u0;
    for (const auto& c : u) u0.push_back(c.slice_function(0));
    run.boundary_l1 = boundary_l1(u0);

    double sup_u = 0.0;
    {
        std::vector<double> v(N);
        for (std::size_t k = 0; k < levels.size(); ++k)
            for (std::size_t i = 0; i < nodes; ++i) {
                for (int c = 0; c < N; ++c) v[c] = u[c].at(i, k);
                sup_u = std::max(sup_u, euclid(v.data(), N));
            }
    }

    for (int j = options.j_min; j <= j_max; ++j) {
        const double unit = std::ldexp(1.0, -j);
        std::array<double, 3> lo{}, hi{};
        for (int k = 0; k < dim; ++k) {
            lo[k] = -g.extent();
            hi[k] = g.extent();
        }
        lo[dim] = 0.0;
        hi[dim] = unit;
        const auto cover = build_cover(j, n, lo, hi);
        const PartitionOfUnity pou(cover);

        std::vector<char> kept(cover.cubes.size(), 0);
        std::vector<std::size_t> kept_list;
        for (std::size_t i = 0; i < cover.cubes.size(); ++i)
            if (inside_region(cover.cubes[i].shifted, g, top)) {
                kept[i] = 1;
                kept_list.push_back(i);
            }

        std::vector<PolyKernelBasis> bases(cover.cubes.size());
        std::vector<std::vector<double>> coeffs(cover.cubes.size());
        parallel_for(kept_list.size(), [&](std::size_t t) {
            const std::size_t i = kept_list[t];
            bases[i] = basis0.on_cube(cover.cubes[i].shifted);
            const auto quad = cube_quadrature(g, levels, bases[i].cube, bases[i].degree);
            coeffs[i] = project_coefficients(u, bases[i], quad);
        });

        TraceIterate it;
        it.j = j;
        it.cube_count = kept_list.size();
        it.dropped = cover.cubes.size() - kept_list.size();
        it.trace.assign(N, BoundaryGridFunction(g));
        it.min_coverage = std::numeric_limits<double>::infinity();

        auto evaluate = [&](const double* x, double* out, double* coverage) {
            std::fill(out, out + N, 0.0);
            double cov = 0.0;
            std::vector<double> val(N);
            for (std::size_t i : cover.containing(x)) {
                if (!kept[i]) continue;
                const double w = pou.phi(i, x);
                if (w == 0.0) continue;
                cov += w;
                evaluate_projection(bases[i], coeffs[i], x, val.data());
                for (int c = 0; c < N; ++c) out[c] += w * val[c];
            }
            if (coverage) *coverage = cov;
        };

        std::vector<double> coverage(nodes);
        parallel_for(nodes, [&](std::size_t i) {
            std::array<double, 3> x{};
            const auto p = g.point(i);
            for (int k = 0; k < dim; ++k) x[k] = p[k];
            x[dim] = 0.0;
            std::vector<double> val(N);
            evaluate(x.data(), val.data(), &coverage[i]);
            for (int c = 0; c < N; ++c) it.trace[c].values[i] = val[c];
        });
        for (double c : coverage) it.min_coverage = std::min(it.min_coverage, c);

        if (options.strip_sup) {
            std::vector<std::size_t> strip;
            for (std::size_t k = 0; k < levels.size(); ++k)
                if (levels[k] < unit) strip.push_back(k);
            std::vector<double> sup(strip.size(), 0.0);
            parallel_for(strip.size(), [&](std::size_t s) {
                const double xn = levels[strip[s]];
                const double e = localizer(j, xn);
                std::array<double, 3> x{};
                std::vector<double> val(N);
                for (std::size_t i = 0; i < nodes; ++i) {
                    const auto p = g.point(i);
                    for (int k = 0; k < dim; ++k) x[k] = p[k];
                    x[dim] = xn;
                    evaluate(x.data(), val.data(), nullptr);
                    sup[s] = std::max(sup[s], e * euclid(val.data(), N));
                }
            });
            const double m = sup.empty() ? 0.0 : *std::max_element(sup.begin(), sup.end());
            it.linf_ratio = sup_u > 0.0 ? m / sup_u : 0.0;
        }

        it.l1_trace_norm = boundary_l1(it.trace);
        it.l1_error = boundary_l1(difference(it.trace, u0));
        it.l1_increment = run.iterates.empty() ? std::numeric_limits<double>::quiet_NaN()
                                               : boundary_l1(difference(it.trace, run.iterates.back().trace));
        run.iterates.push_back(std::move(it));
    }
    return run;
}

FieldComponents interior_part(const FieldComponents& u, int j) {
    auto out = u;
    for (auto& c : out)
        for (std::size_t k = 0; k < c.level_count(); ++k) {
            const double w = 1.0 - localizer(j, c.levels()[k]);
            for (double& v : c.slice(k)) v *= w;
        }
    return out;
}

double operator_l1(const FieldComponents& u, const DiffOperator& op) {
    validate_field(u, op);
    const auto& g = u.front().grid();
    const std::size_t nodes = g.node_count();
    const std::size_t K = u.front().level_count();
    std::vector<GradientField> grads;
    for (const auto& c : u) grads.push_back(discrete_gradient(c));
    const auto wl = level_weights(u.front().levels());
    CompensatedSum acc;
    std::vector<double> Au(op.M);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t i = 0; i < nodes; ++i) {
            std::fill(Au.begin(), Au.end(), 0.0);
            const std::size_t idx = k * nodes + i;
            for (int j = 0; j < op.n; ++j)
                for (int m = 0; m < op.M; ++m)
                    for (int c = 0; c < op.N; ++c) Au[m] += op.coeff(j, m, c) * grads[c].components[j][idx];
            acc.add(wl[k] * g.weight(i) * euclid(Au.data(), op.M));
        }
    return acc.value();
}

TraceBounds trace_bounds_check(const TraceRun& run, const FieldComponents& u) {
    TraceBounds b;
    if (run.iterates.empty()) return b;
    const double Au = operator_l1(u, run.op);
    b.l1_constant = Au > 0.0 ? run.last().l1_trace_norm / Au : 0.0;
    b.linf_min = std::numeric_limits<double>::infinity();
    for (const auto& it : run.iterates) {
        b.linf_max = std::max(b.linf_max, it.linf_ratio);
        b.linf_min = std::min(b.linf_min, it.linf_ratio);
    }
    return b;
}

double norm_equivalence_constant(const PolyKernelBasis& basis, const Cube& Q, std::size_t samples,
                                 std::uint64_t seed) {
    const int n = basis.op.n;
    const int N = basis.op.N;
    Cube shifted = Q;
    shifted.center[n - 1] += Q.side / 1.5;
    const Cube big = Q.dilate(3.0);
    std::vector<double> gx, gw;
    gauss_legendre(16, gx, gw);

    auto average = [&](const Cube& c, const std::vector<double>& coef) {
        double num = 0.0, den = 0.0;
        std::array<double, 3> x{};
        std::vector<double> val(N);
        const int g = static_cast<int>(gx.size());
        for (int a = 0; a < g; ++a)
            for (int b = 0; b < g; ++b)
                for (int e = 0; e < (n == 3 ? g : 1); ++e) {
                    const int idx[3] = {a, b, e};
                    double w = 1.0;
                    for (int k = 0; k < n; ++k) {
                        x[k] = c.center[k] + 0.5 * c.side * gx[idx[k]];
                        w *= gw[idx[k]];
                    }
                    evaluate_projection(basis, coef, x.data(), val.data());
                    num += w * euclid(val.data(), N);
                    den += w;
                }
        return num / den;
    };

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 1.0;
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> coef(basis.size());
        double norm = 0.0;
        for (double& c : coef) {
            c = gauss(rng);
            norm += c * c;
        }
        for (double& c : coef) c /= std::sqrt(norm);
        const double a = average(shifted, coef);
        const double b = average(big, coef);
        if (a > 0.0 && b > 0.0) worst = std::max({worst, a / b, b / a});
    }
    return worst;
}

double inverse_estimate_constant(const PolyKernelBasis& basis, const BoundaryGrid& grid,
                                 const std::vector<double>& levels, std::size_t samples, std::uint64_t seed) {
    const int n = basis.op.n;
    const int N = basis.op.N;
    const auto quad = cube_quadrature(grid, levels, basis.cube, basis.degree);
    const std::size_t l = basis.size();

    // Tensor list of quadrature points and weights.
    std::vector<std::array<double, 3>> pts;
    std::vector<double> wts;
    const std::size_t c0 = quad.coord[0].size(), c1 = quad.coord[1].size(), c2 = n == 3 ? quad.coord[2].size() : 1;
    for (std::size_t a = 0; a < c0; ++a)
        for (std::size_t b = 0; b < c1; ++b)
            for (std::size_t c = 0; c < c2; ++c) {
                pts.push_back({quad.coord[0][a], quad.coord[1][b], n == 3 ? quad.coord[2][c] : 0.0});
                wts.push_back(quad.weight[0][a] * quad.weight[1][b] * (n == 3 ? quad.weight[2][c] : 1.0));
            }
    std::vector<double> basis_vals(pts.size() * l * N);
    for (std::size_t p = 0; p < pts.size(); ++p) basis.evaluate_all(pts[p].data(), basis_vals.data() + p * l * N);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    constexpr int terms = 4;
    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        struct Wave {
            double amp, phase;
            std::array<double, 3> freq;
        };
        std::vector<std::vector<Wave>> waves(N);
        for (auto& comp : waves)
            for (int t = 0; t < terms; ++t) {
                Wave w{gauss(rng), phase(rng), {}};
                for (int k = 0; k < n; ++k) w.freq[k] = 1.5 * gauss(rng);
                comp.push_back(w);
            }
        std::vector<double> uvals(pts.size() * N);
        double avg = 0.0;
        for (std::size_t p = 0; p < pts.size(); ++p) {
            for (int c = 0; c < N; ++c) {
                double v = 0.0;
                for (const auto& w : waves[c]) {
                    double arg = w.phase;
                    for (int k = 0; k < n; ++k) arg += w.freq[k] * (pts[p][k] - basis.cube.center[k]) / (0.5 * basis.cube.side);
                    v += w.amp * std::cos(arg);
                }
                uvals[p * N + c] = v;
            }
            avg += wts[p] * euclid(uvals.data() + p * N, N);
        }
        avg /= basis.cube.volume();
        std::vector<double> coef(l, 0.0);
        for (std::size_t p = 0; p < pts.size(); ++p)
            for (std::size_t i = 0; i < l; ++i)
                for (int c = 0; c < N; ++c) coef[i] += wts[p] * uvals[p * N + c] * basis_vals[(p * l + i) * N + c];
        double sup = 0.0;
        std::vector<double> val(N);
        for (std::size_t p = 0; p < pts.size(); ++p) {
            for (int c = 0; c < N; ++c) {
                double v = 0.0;
                for (std::size_t i = 0; i < l; ++i) v += coef[i] * basis_vals[(p * l + i) * N + c];
                val[c] = v;
            }
            sup = std::max(sup, euclid(val.data(), N));
        }
        if (avg > 0.0) worst = std::max(worst, sup / avg);
    }
    return worst;
}

}  // namespace tracelab
