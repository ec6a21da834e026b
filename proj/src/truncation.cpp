#include "tracelab/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tracelab/cutoff.hpp"
#include "tracelab/error.hpp"
#include "tracelab/mollifier.hpp"
#include "tracelab/parallel.hpp"
#include "tracelab/poisson.hpp"

namespace tracelab {

namespace {

constexpr SmoothCutoff eta{};

double sup_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

std::size_t first_positive_level(const HalfSpaceField& u) {
    const auto& lv = u.levels();
    for (std::size_t k = 0; k < lv.size(); ++k)
        if (lv[k] > 0.0) return k;
    throw DomainError("field has no positive level");
}

CheckRow base_row(const ExponentSet& e, const BoundaryGrid& g) {
    CheckRow row;
    row.n = e.n();
    row.p = e.p();
    row.q = e.q().as_double();
    row.r = e.q_is_infinite() ? std::numeric_limits<double>::infinity() : e.r();
    row.beta = e.q_is_infinite() ? std::numeric_limits<double>::infinity() : e.beta();
    row.h = g.spacing();
    return row;
}

}  // namespace

double TruncationExtension::psi(std::size_t node, std::size_t k) const {
    return v.levels()[k] * std::pow(std::fabs(v.at(node, k)), exponents.beta());
}

std::vector<double> truncation_levels(double h_min, double ratio, double x_max) {
    return geometric_levels(h_min, ratio, x_max, true);
}

TruncationExtension nonlinear_extend(const BoundaryGridFunction& f, const ExponentSet& e, std::vector<double> levels) {
    if (e.q_is_infinite()) throw DomainError("q = inf uses linf_extend");
    const double beta = e.beta();
    auto v = poisson_extend(f, std::move(levels));
    HalfSpaceField u(v.grid(), v.levels());
    const std::size_t N = v.grid().node_count();
    parallel_for(v.level_count(), [&](std::size_t k) {
        const double xn = v.levels()[k];
        const auto vs = v.slice(k);
        auto us = u.slice(k);
        for (std::size_t i = 0; i < N; ++i) {
            const double psi = xn * std::pow(std::fabs(vs[i]), beta);
            us[i] = eta(psi) * vs[i];
        }
    });
    return TruncationExtension{e, f, std::move(v), std::move(u)};
}

CheckRow support_check(const TruncationExtension& ext) {
    CheckRow row = base_row(ext.exponents, ext.f.grid);
    row.check_name = "support_xn_v_beta";
    double worst = 0.0;
    const std::size_t N = ext.f.grid.node_count();
    for (std::size_t k = 0; k < ext.u.level_count(); ++k)
        for (std::size_t i = 0; i < N; ++i)
            if (ext.u.at(i, k) != 0.0) worst = std::max(worst, ext.psi(i, k));
    row.value = worst;
    row.bound = SmoothCutoff::support_end;
    row.margin = relative_margin(row.value, row.bound);
    row.passed = row.value <= row.bound;
    return row;
}

PointwiseReport pointwise_bound_check(const TruncationExtension& ext, const BoundaryGridFunction& maximal,
                                      std::optional<double> tol) {
    const auto dom = check_maximal_domination(ext.v, maximal);
    PointwiseReport rep;
    rep.domination_gap = dom.gap();
    const double allowance = 1e-12 * std::max(1.0, sup_abs(ext.f.values));
    const double t = tol.value_or(2.0 * rep.domination_gap + allowance);

    const double inv_beta = 1.0 / ext.exponents.beta();
    const std::size_t N = ext.f.grid.node_count();
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ext.u.level_count(); ++k) {
        const double xn = ext.u.levels()[k];
        const double cap = xn > 0.0 ? std::pow(2.0 / xn, inv_beta) : std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < N; ++i) {
            const double bound = std::min(maximal.values[i], cap);
            const double d = std::fabs(ext.u.at(i, k)) - bound;
            if (d > worst) {
                worst = d;
                rep.node = i;
                rep.level = k;
            }
        }
    }
    rep.row = base_row(ext.exponents, ext.f.grid);
    rep.row.check_name = "pointwise_bound";
    rep.row.value = worst;
    rep.row.bound = t;
    rep.row.margin = t - worst;
    rep.row.passed = worst <= t;
    return rep;
}

double step1_constant(const ExponentSet& e) { return 2.0 * e.q_finite() / e.r(); }

CheckRow step1_bound_check(const TruncationExtension& ext, const BoundaryGridFunction& maximal) {
    const double q = ext.exponents.q_finite();
    const double r = ext.exponents.r();
    const auto wl = level_weights(ext.u.levels());
    const std::size_t N = ext.f.grid.node_count();
    std::vector<double> ratio(N, 0.0);
    parallel_for(N, [&](std::size_t i) {
        CompensatedSum acc;
        for (std::size_t k = 0; k < ext.u.level_count(); ++k) acc.add(wl[k] * std::pow(std::fabs(ext.u.at(i, k)), q));
        const double mf = std::pow(maximal.values[i], r);
        ratio[i] = mf > 0.0 ? acc.value() / mf : 0.0;
    });
    CheckRow row = base_row(ext.exponents, ext.f.grid);
    row.check_name = "step1_level_integral";
    row.value = *std::max_element(ratio.begin(), ratio.end());
    row.bound = step1_constant(ext.exponents);
    row.margin = relative_margin(row.value, row.bound);
    row.passed = row.value <= row.bound;
    return row;
}

ChiefBoundReport chief_bound_check(const TruncationExtension& ext, std::size_t seminorm_cap) {
    const auto& e = ext.exponents;
    const double p = e.p(), q = e.q_finite(), r = e.r();
    ChiefBoundReport rep;
    const double fr = lp_norm(ext.f, r);
    if (fr == 0.0) {
        rep.trivial = true;
        return rep;
    }
    rep.lhs = lp_norm(ext.u, q) + gradient_lp_norm(discrete_gradient(ext.u), p);
    rep.rhs = std::pow(fr, r / q) + std::pow(fr, r / p) + gagliardo_seminorm(ext.f, {e.s(), p}, seminorm_cap);
    rep.ratio = rep.lhs / rep.rhs;
    return rep;
}

TraceRecoveryReport trace_recovery_check(const HalfSpaceField& u, const BoundaryGridFunction& f) {
    if (!(u.grid() == f.grid)) throw DomainError("field and data live on different grids");
    const std::size_t k = first_positive_level(u);
    const auto s = u.slice(k);
    BoundaryGridFunction diff(f.grid);
    for (std::size_t i = 0; i < s.size(); ++i) diff.values[i] = s[i] - f.values[i];
    TraceRecoveryReport rep;
    rep.h_min = u.levels()[k];
    rep.l1_error = lp_norm(diff, 1.0);
    const double fl1 = lp_norm(f, 1.0);
    rep.relative = fl1 > 0.0 ? rep.l1_error / fl1 : 0.0;
    return rep;
}

TraceRecoveryReport trace_recovery_check(const TruncationExtension& ext) {
    return trace_recovery_check(ext.u, ext.f);
}

MultiplicativeReport multiplicative_trace_inequality(const HalfSpaceField& u, double p, double q) {
    const double r = trace_exponent(p, q);
    const auto trace = restrict_to_boundary(u);
    MultiplicativeReport rep;
    rep.lhs = lp_power(trace, r);
    const double grad = gradient_lp_norm(discrete_gradient(u), p);
    rep.rhs = r * grad * std::pow(lp_norm(u, q), r - 1.0);
    if (rep.rhs == 0.0) {
        rep.margin = rep.lhs == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    } else {
        rep.margin = (rep.rhs - rep.lhs) / rep.rhs;
    }
    rep.holds = rep.lhs <= rep.rhs;
    return rep;
}

double collapse_measure(const TruncationExtension& ext) {
    const std::size_t k = first_positive_level(ext.u);
    const auto s = ext.u.slice(k);
    CompensatedSum acc;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] == 0.0 && ext.f.values[i] != 0.0) acc.add(ext.f.grid.weight(i));
    return acc.value();
}

double lifting_distance(const HalfSpaceField& a, const HalfSpaceField& b, double p, double q) {
    if (!(a.grid() == b.grid()) || a.levels() != b.levels()) throw DomainError("fields live on different grids");
    HalfSpaceField d(a.grid(), a.levels());
    for (std::size_t i = 0; i < d.size(); ++i) d.values()[i] = a.values()[i] - b.values()[i];
    return lp_norm(d, q) + gradient_lp_norm(discrete_gradient(d), p);
}

HalfSpaceField linf_extend(const BoundaryGridFunction& f, std::vector<double> levels) {
    HalfSpaceField out(f.grid, std::move(levels));
    for (std::size_t k = 0; k < out.level_count(); ++k) {
        const double t = out.levels()[k];
        auto s = out.slice(k);
        const double c = eta(t);
        if (c == 0.0) continue;
        const auto m = mollify(f, t);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = c * m.values[i];
    }
    return out;
}

}  // namespace tracelab
