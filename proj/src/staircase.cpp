#include "tracelab/staircase.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "tracelab/cutoff.hpp"
#include "tracelab/error.hpp"
#include "tracelab/mollifier.hpp"
#include "tracelab/norms.hpp"
#include "tracelab/parallel.hpp"

namespace tracelab {

namespace {

constexpr SmoothCutoff eta{};

double l1_difference(const BoundaryGridFunction& a, const BoundaryGridFunction& b) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < a.values.size(); ++i) acc.add(a.grid.weight(i) * std::fabs(a.values[i] - b.values[i]));
    return acc.value();
}

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

/// Bounded interpolation from a (s = 0) to b (s = 1), exact at both ends.
double interpolate(double a, double b, double s) {
    const double x = std::lerp(a, b, s);
    return std::clamp(x, std::min(a, b), std::max(a, b));
}

// 8-point Gauss-Legendre nodes and weights on [0, 1].
constexpr std::array<double, 8> gl_nodes{0.019855071751231856, 0.10166676129318664, 0.2372337950418355,
                                         0.4082826787521751,  0.5917173212478249,  0.7627662049581645,
                                         0.8983332387068134,  0.9801449282487681};
constexpr std::array<double, 8> gl_weights{0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
                                           0.18134189168918100, 0.18134189168918100, 0.15685332293894363,
                                           0.11119051722668724, 0.05061426814518813};

}  // namespace

ApproximatingSequence build_approximants(const BoundaryGridFunction& f, int J, const ApproximantOptions& options) {
    if (J < 1) throw DomainError("need at least one layer");
    if (J > options.max_layers) throw DomainError("layer count exceeds the configured maximum");
    for (double x : f.values)
        if (!std::isfinite(x)) throw DomainError("non-finite boundary data");

    const auto& g = f.grid;
    ApproximatingSequence seq{f, lp_norm(f, 1.0), {}, {}, {}, {}};
    seq.members.emplace_back(g);
    seq.errors.push_back(seq.f_l1);
    seq.widths.push_back(0.0);
    seq.radii.push_back(0.0);

    const double R0 = options.initial_radius > 0.0 ? options.initial_radius : g.extent() / 4.0;
    double delta = options.initial_width > 0.0 ? options.initial_width : g.extent() / 4.0;

    for (int j = 1; j <= J; ++j) {
        const double target = std::ldexp(seq.f_l1, -j);
        const double R = std::ldexp(R0, j);
        std::vector<double> cut(g.node_count());
        for (std::size_t i = 0; i < cut.size(); ++i) {
            const auto x = g.point(i);
            cut[i] = eta(std::hypot(x[0], x[1]) / R);
        }
        for (int halvings = 0;; ++halvings) {
            auto fj = mollify(f, delta);
            for (std::size_t i = 0; i < cut.size(); ++i) fj.values[i] *= cut[i];
            const double e = l1_difference(f, fj);
            if (e <= target) {
                seq.members.push_back(std::move(fj));
                seq.errors.push_back(e);
                seq.widths.push_back(delta);
                seq.radii.push_back(R);
                break;
            }
            if (halvings >= options.max_halvings)
                throw ConvergenceError("approximant " + std::to_string(j) + " reached error " + std::to_string(e) +
                                       " > target " + std::to_string(target));
            delta *= 0.5;
        }
    }
    return seq;
}

LayerSchedule build_schedule(const ApproximatingSequence& seq, Integrability q) {
    if (!(seq.f_l1 > 0.0)) throw DomainError("schedule needs nonzero data");
    const int J = seq.layers();
    LayerSchedule sch;
    sch.q = q;
    sch.data_scale = q.is_infinite() ? seq.f_l1 : std::pow(seq.f_l1, q.value());
    const double F = sch.data_scale;

    for (const auto& fj : seq.members) {
        const double size = q.is_infinite() ? lp_norm(fj, inf_exponent) : lp_power(fj, q.value());
        sch.gammas.push_back(size + tangential_gradient_l1(fj));
    }

    sch.widths.resize(J + 1);
    for (int j = 0; j < J; ++j)
        sch.widths[j] = std::ldexp(F, -j - 1) / (1.0 + sch.gammas[j] + sch.gammas[j + 1] + F);
    sch.widths[J] = std::ldexp(F, -J) / (1.0 + 2.0 * sch.gammas[J] + F);

    sch.heights.assign(J + 1, 0.0);
    CompensatedSum acc;
    acc.add(sch.widths[J]);
    sch.heights[J] = acc.value();
    for (int j = J - 1; j >= 0; --j) {
        acc.add(sch.widths[j]);
        sch.heights[j] = acc.value();
    }
    return sch;
}

double StaircaseField::evaluate(std::size_t node, double x_n) const {
    const auto& t = schedule.heights;
    const int J = schedule.layers();
    if (x_n >= t[0]) return 0.0;
    if (x_n <= t[J]) return sequence.members[J].values[node];
    // strip j = [t_{j+1}, t_j]
    int j = 0;
    while (!(x_n >= t[j + 1])) ++j;
    const double s = (x_n - t[j + 1]) / (t[j] - t[j + 1]);
    return interpolate(sequence.members[j + 1].values[node], sequence.members[j].values[node], s);
}

StaircaseField staircase_extend(const BoundaryGridFunction& f, Integrability q, int J,
                                const ApproximantOptions& options, int samples_per_strip) {
    const int n = f.grid.ambient_dim();
    if (!q.is_infinite() && !(q.value() > n / (n - 1.0)))
        throw DomainError("staircase lifting needs q > n/(n-1)");
    if (samples_per_strip < 0) throw DomainError("samples per strip must be >= 0");

    auto seq = build_approximants(f, J, options);
    auto sch = build_schedule(seq, q);

    std::vector<double> levels;
    const auto& t = sch.heights;
    levels.push_back(t[J]);
    for (int j = J - 1; j >= 0; --j) {
        for (int k = 1; k <= samples_per_strip; ++k)
            levels.push_back(t[j + 1] + (t[j] - t[j + 1]) * k / (samples_per_strip + 1.0));
        levels.push_back(t[j]);
    }

    StaircaseField out{std::move(seq), std::move(sch), HalfSpaceField(f.grid, levels), samples_per_strip};
    const auto& heights = out.schedule.heights;
    const std::size_t N = f.grid.node_count();
    parallel_for(out.u.level_count(), [&](std::size_t k) {
        auto s = out.u.slice(k);
        const double x = out.u.levels()[k];
        for (std::size_t i = 0; i < N; ++i) s[i] = out.evaluate(i, x);
    });
    // Layer heights are stored exactly so that the sampled slices are f_j bit for bit.
    for (int j = 0; j <= J; ++j) {
        const std::size_t k = static_cast<std::size_t>((J - j) * (samples_per_strip + 1));
        auto s = out.u.slice(k);
        for (std::size_t i = 0; i < N; ++i) s[i] = out.evaluate(i, heights[j]);
    }
    return out;
}

double linear_power_mean(double a, double b, double q) {
    const double x = std::fabs(a), y = std::fabs(b);
    if (x == y && (a == b || x == 0.0)) return std::pow(x, q);
    if ((a < 0.0) != (b < 0.0) && a != 0.0 && b != 0.0)
        return (std::pow(x, q + 1.0) + std::pow(y, q + 1.0)) / ((q + 1.0) * (x + y));
    const double lo = std::min(x, y), hi = std::max(x, y);
    if (hi - lo > 1e-4 * hi) return (std::pow(hi, q + 1.0) - std::pow(lo, q + 1.0)) / ((q + 1.0) * (hi - lo));
    double acc = 0.0;
    for (std::size_t k = 0; k < gl_nodes.size(); ++k) acc += gl_weights[k] * std::pow(lo + (hi - lo) * gl_nodes[k], q);
    return acc;
}

StaircaseBounds staircase_bounds_check(const StaircaseField& field) {
    const auto& seq = field.sequence;
    const auto& sch = field.schedule;
    const auto& g = seq.f.grid;
    const int J = sch.layers();
    const std::size_t N = g.node_count();
    const double F = sch.data_scale;
    StaircaseBounds b;

    std::vector<std::vector<std::vector<double>>> grads;
    std::vector<double> grad_l1;
    for (const auto& fj : seq.members) {
        grads.push_back(tangential_gradient(fj));
        grad_l1.push_back(tangential_gradient_l1(fj));
    }

    if (!sch.q.is_infinite()) {
        const double q = sch.q.value();
        CompensatedSum acc;
        for (int j = 0; j < J; ++j) {
            CompensatedSum strip;
            for (std::size_t i = 0; i < N; ++i)
                strip.add(g.weight(i) * linear_power_mean(seq.members[j + 1].values[i], seq.members[j].values[i], q));
            acc.add(sch.widths[j] * strip.value());
        }
        acc.add(sch.heights[J] * lp_power(seq.members[J], q));
        b.lq_power = acc.value();
        b.lq_bound = (std::pow(2.0, q) + 1.0) * std::pow(seq.f_l1, q);
    }

    CompensatedSum normal;
    for (int j = 0; j < J; ++j) normal.add(l1_difference(seq.members[j + 1], seq.members[j]));
    b.normal_l1 = normal.value();
    b.normal_bound = 3.0 * seq.f_l1;

    CompensatedSum tangential, tangential_bound;
    const int dim = g.dim();
    for (int j = 0; j < J; ++j) {
        CompensatedSum strip;
        for (std::size_t i = 0; i < N; ++i) {
            double avg = 0.0;
            for (std::size_t k = 0; k < gl_nodes.size(); ++k) {
                double s2 = 0.0;
                for (int d = 0; d < dim; ++d) {
                    const double c = interpolate(grads[j + 1][d][i], grads[j][d][i], gl_nodes[k]);
                    s2 += c * c;
                }
                avg += gl_weights[k] * std::sqrt(s2);
            }
            strip.add(g.weight(i) * avg);
        }
        tangential.add(sch.widths[j] * strip.value());
        tangential_bound.add(sch.widths[j] * (grad_l1[j] + grad_l1[j + 1]));
    }
    tangential.add(sch.heights[J] * grad_l1[J]);
    tangential_bound.add(sch.heights[J] * grad_l1[J]);
    b.tangential_l1 = tangential.value();
    b.tangential_bound = tangential_bound.value();
    b.tangential_ratio = F > 0.0 ? b.tangential_l1 / F : 0.0;

    // Sampled field: layer values, strip bounds, linearity.
    const auto& u = field.u;
    const int sub = field.samples_per_strip;
    for (int j = 0; j <= J; ++j) {
        const std::size_t k = static_cast<std::size_t>((J - j) * (sub + 1));
        const auto s = u.slice(k);
        BoundaryGridFunction layer(g, std::vector<double>(s.begin(), s.end()));
        for (std::size_t i = 0; i < N; ++i)
            b.layer_value_error = std::max(b.layer_value_error, std::fabs(s[i] - seq.members[j].values[i]));
        b.trace_errors.push_back(l1_difference(layer, seq.f));
    }
    b.strip_excess = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < J; ++j) {
        const std::size_t top = static_cast<std::size_t>((J - j) * (sub + 1));
        const std::size_t bottom = static_cast<std::size_t>((J - j - 1) * (sub + 1));
        for (std::size_t k = bottom; k <= top; ++k) {
            const auto s = u.slice(k);
            for (std::size_t i = 0; i < N; ++i)
                b.strip_excess = std::max(b.strip_excess, std::fabs(s[i]) - std::fabs(seq.members[j].values[i]) -
                                                              std::fabs(seq.members[j + 1].values[i]));
        }
        const auto& lv = u.levels();
        for (std::size_t k = bottom + 1; k < top; ++k) {
            const double h0 = lv[k] - lv[k - 1], h1 = lv[k + 1] - lv[k];
            const auto a = u.slice(k - 1), c = u.slice(k), d = u.slice(k + 1);
            for (std::size_t i = 0; i < N; ++i) {
                const double slope0 = (c[i] - a[i]) / h0, slope1 = (d[i] - c[i]) / h1;
                const double scale = std::max({std::fabs(seq.members[j].values[i]), std::fabs(seq.members[j + 1].values[i]), 1e-300}) /
                                     (sch.heights[j] - sch.heights[j + 1]);
                b.linearity_defect = std::max(b.linearity_defect, std::fabs(slope1 - slope0) / scale);
            }
        }
    }
    b.sup_u = sup_abs(u.values());
    b.sup_f = sup_abs(seq.f.values);
    return b;
}

std::vector<CheckRow> StaircaseBounds::rows(const StaircaseField& field) const {
    const auto& g = field.sequence.f.grid;
    const auto& q = field.schedule.q;
    auto make = [&](const char* name, double value, double bound, bool passed) {
        CheckRow row;
        row.check_name = name;
        row.n = g.ambient_dim();
        row.p = 1.0;
        row.q = q.as_double();
        row.h = g.spacing();
        row.value = value;
        row.bound = bound;
        row.margin = relative_margin(value, bound);
        row.passed = passed;
        return row;
    };
    std::vector<CheckRow> out;
    out.push_back(make("layer_values_exact", layer_value_error, 0.0, layer_value_error == 0.0));
    out.push_back(make("strip_pointwise", strip_excess, 0.0, strip_excess <= 0.0));
    const double fl1 = field.sequence.f_l1;
    for (std::size_t j = 0; j < trace_errors.size(); ++j) {
        const double bound = std::ldexp(fl1, -static_cast<int>(j));
        out.push_back(make(("trace_error_j" + std::to_string(j)).c_str(), trace_errors[j], bound, trace_errors[j] <= bound));
    }
    out.push_back(make("normal_derivative_l1", normal_l1, normal_bound, normal_l1 <= normal_bound));
    out.push_back(make("tangential_gradient_l1", tangential_l1, tangential_bound, tangential_l1 <= tangential_bound * (1.0 + 1e-12)));
    if (q.is_infinite()) {
        out.push_back(make("sup_norm", sup_u, sup_f, sup_u <= sup_f));
    } else {
        out.push_back(make("lq_power", lq_power, lq_bound, lq_power <= lq_bound));
    }
    return out;
}

}  // namespace tracelab
