#include "tracelab/celliptic_cover.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tracelab/cutoff.hpp"
#include "tracelab/error.hpp"

namespace tracelab {

namespace {

constexpr double half_side = 0.75;
constexpr double core = 0.25;

std::array<int, 3> index_range(double lo, double hi, double unit) {
    return {static_cast<int>(std::ceil(lo / unit - half_side)), static_cast<int>(std::floor(hi / unit + half_side)), 0};
}

}  // namespace

CubeCover build_cover(int j, int n, const std::array<double, 3>& lo, const std::array<double, 3>& hi) {
    if (n != 2 && n != 3) throw DomainError("covers are built for n = 2, 3");
    if (j < 0 || j > 30) throw DomainError("cover level out of range");
    for (int k = 0; k < n; ++k)
        if (!(hi[k] > lo[k])) throw DomainError("empty cover box");
    CubeCover cover;
    cover.j = j;
    cover.n = n;
    cover.unit = std::ldexp(1.0, -j);
    cover.lo = lo;
    cover.hi = hi;
    const double u = cover.unit;
    std::array<std::array<int, 3>, 3> r{};
    for (int k = 0; k < n; ++k) {
        r[k] = index_range(lo[k], hi[k], u);
        cover.range[k] = {r[k][0], r[k][1]};
    }
    const int last = n - 1;
    auto add = [&](std::array<int, 3> z) {
        CoverCube c;
        c.z = z;
        c.cube.n = n;
        c.cube.side = 2.0 * half_side * u;
        for (int k = 0; k < n; ++k) c.cube.center[k] = u * z[k];
        c.shifted = c.cube;
        c.shifted.center[last] += u;
        cover.cubes.push_back(c);
    };
    for (int a = r[0][0]; a <= r[0][1]; ++a)
        for (int b = r[1][0]; b <= r[1][1]; ++b) {
            if (n == 2) {
                add({a, b, 0});
                continue;
            }
            for (int c = r[2][0]; c <= r[2][1]; ++c) add({a, b, c});
        }
    return cover;
}

std::vector<std::size_t> CubeCover::containing(const double* x) const {
    std::vector<std::size_t> out;
    std::array<int, 3> a{}, b{}, extent{1, 1, 1};
    for (int k = 0; k < n; ++k) {
        a[k] = std::max(range[k][0], static_cast<int>(std::ceil(x[k] / unit - half_side)));
        b[k] = std::min(range[k][1], static_cast<int>(std::floor(x[k] / unit + half_side)));
        if (a[k] > b[k]) return out;
        extent[k] = range[k][1] - range[k][0] + 1;
    }
    auto flat = [&](int z0, int z1, int z2) {
        std::size_t idx = static_cast<std::size_t>(z0 - range[0][0]) * extent[1] + (z1 - range[1][0]);
        if (n == 3) idx = idx * extent[2] + (z2 - range[2][0]);
        return idx;
    };
    for (int z0 = a[0]; z0 <= b[0]; ++z0)
        for (int z1 = a[1]; z1 <= b[1]; ++z1)
            for (int z2 = (n == 3 ? a[2] : 0); z2 <= (n == 3 ? b[2] : 0); ++z2) {
                const std::size_t i = flat(z0, z1, z2);
                if (cubes[i].cube.contains(x)) out.push_back(i);
            }
    return out;
}

CoverReport check_cover(const CubeCover& cover, std::size_t probes, std::uint64_t seed) {
    CoverReport rep;
    const int n = cover.n;
    const double u = cover.unit;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::array<double, 3> x{};
    for (std::size_t s = 0; s < probes; ++s) {
        for (int k = 0; k < n; ++k) x[k] = cover.lo[k] + (cover.hi[k] - cover.lo[k]) * uni(rng);
        const int count = static_cast<int>(cover.containing(x.data()).size());
        if (count == 0) rep.covers = false;
        rep.max_overlap = std::max(rep.max_overlap, count);
    }
    // Generic point: every coordinate a third of a unit off the lattice.
    for (int k = 0; k < n; ++k) x[k] = std::clamp(0.5 * (cover.lo[k] + cover.hi[k]), cover.lo[k], cover.hi[k]);
    for (int k = 0; k < n; ++k) x[k] = u * (std::floor(x[k] / u) + 1.0 / 3.0);
    rep.generic_overlap = static_cast<int>(cover.containing(x.data()).size());

    rep.min_intersection = std::numeric_limits<double>::infinity();
    rep.max_intersection = 0.0;
    for (std::size_t a = 0; a < cover.cubes.size(); ++a)
        for (std::size_t b = a + 1; b < cover.cubes.size(); ++b) {
            double vol = 1.0;
            for (int k = 0; k < n; ++k) {
                const auto& A = cover.cubes[a].cube;
                const auto& B = cover.cubes[b].cube;
                const double len = std::min(A.hi(k), B.hi(k)) - std::max(A.lo(k), B.lo(k));
                vol *= std::max(0.0, len);
            }
            if (vol <= 0.0) continue;
            const double scaled = vol / std::pow(u, n);
            rep.min_intersection = std::min(rep.min_intersection, scaled);
            rep.max_intersection = std::max(rep.max_intersection, scaled);
        }
    if (rep.max_intersection == 0.0) rep.min_intersection = 0.0;
    rep.intersection_constant =
        rep.max_intersection > 0.0 ? std::max(rep.max_intersection, 1.0 / rep.min_intersection) : 0.0;
    return rep;
}

double pou_profile(double t) noexcept {
    const double a = std::fabs(t);
    if (a <= core) return 1.0;
    if (a >= half_side) return 0.0;
    return smoothstep((half_side - a) / (half_side - core));
}

double pou_profile_derivative(double t) noexcept {
    const double a = std::fabs(t);
    if (a <= core || a >= half_side) return 0.0;
    const double d = -smoothstep_derivative((half_side - a) / (half_side - core)) / (half_side - core);
    return t < 0.0 ? -d : d;
}

double PartitionOfUnity::psi(std::size_t i, const double* x) const {
    const auto& c = cover_->cubes[i];
    double v = 1.0;
    for (int k = 0; k < cover_->n; ++k) v *= pou_profile(x[k] / cover_->unit - c.z[k]);
    return v;
}

double PartitionOfUnity::sum(const double* x) const {
    double num = 0.0;
    for (std::size_t i : cover_->containing(x)) num += phi(i, x);
    return num;
}

double PartitionOfUnity::phi(std::size_t i, const double* x) const {
    const double own = psi(i, x);
    if (own == 0.0) return 0.0;
    double den = 0.0;
    for (std::size_t k : cover_->containing(x)) den += psi(k, x);
    return own / den;
}

std::array<double, 3> PartitionOfUnity::phi_gradient(std::size_t i, const double* x) const {
    const int n = cover_->n;
    const double u = cover_->unit;
    auto grad_psi = [&](std::size_t idx) {
        std::array<double, 3> g{};
        const auto& z = cover_->cubes[idx].z;
        std::array<double, 3> val{}, der{};
        for (int k = 0; k < n; ++k) {
            val[k] = pou_profile(x[k] / u - z[k]);
            der[k] = pou_profile_derivative(x[k] / u - z[k]) / u;
        }
        for (int k = 0; k < n; ++k) {
            double v = der[k];
            for (int l = 0; l < n; ++l)
                if (l != k) v *= val[l];
            g[k] = v;
        }
        return g;
    };
    const auto near = cover_->containing(x);
    double S = 0.0;
    std::array<double, 3> dS{};
    for (std::size_t k : near) {
        S += psi(k, x);
        const auto g = grad_psi(k);
        for (int d = 0; d < n; ++d) dS[d] += g[d];
    }
    std::array<double, 3> out{};
    if (S == 0.0) return out;
    const double p = psi(i, x);
    const auto gp = grad_psi(i);
    for (int d = 0; d < n; ++d) out[d] = (gp[d] * S - p * dS[d]) / (S * S);
    return out;
}

PartitionReport check_partition(const PartitionOfUnity& pou, std::size_t probes, std::uint64_t seed) {
    const auto& cover = pou.cover();
    const int n = cover.n;
    PartitionReport rep;
    rep.min_value = 1.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::array<double, 3> x{};
    for (std::size_t s = 0; s < probes; ++s) {
        for (int k = 0; k < n; ++k) x[k] = cover.lo[k] + (cover.hi[k] - cover.lo[k]) * uni(rng);
        rep.max_sum_error = std::max(rep.max_sum_error, std::fabs(pou.sum(x.data()) - 1.0));
        for (std::size_t i : cover.containing(x.data())) {
            const double v = pou.phi(i, x.data());
            rep.min_value = std::min(rep.min_value, v);
            rep.max_value = std::max(rep.max_value, v);
            const auto g = pou.phi_gradient(i, x.data());
            double norm = 0.0;
            for (int k = 0; k < n; ++k) norm = std::max(norm, std::fabs(g[k]));
            rep.scaled_gradient = std::max(rep.scaled_gradient, cover.unit * norm);
        }
    }
    return rep;
}

double localizer(int j, double x_n) noexcept { return SmoothCutoff{}(std::ldexp(x_n, j + 1)); }

double localizer_derivative(int j, double x_n) noexcept {
    return std::ldexp(1.0, j + 1) * SmoothCutoff{}.derivative(std::ldexp(x_n, j + 1));
}

LocalizerReport check_localizer(int j, std::size_t probes) {
    LocalizerReport rep;
    const double u = std::ldexp(1.0, -j);
    for (std::size_t s = 0; s <= probes; ++s) {
        const double x = 1.5 * u * static_cast<double>(s) / static_cast<double>(probes);
        const double e = localizer(j, x);
        const double lower = x < 0.5 * u ? 1.0 : 0.0;
        const double upper = x < u ? 1.0 : 0.0;
        if (e < lower || e > upper) rep.sandwich = false;
        rep.scaled_gradient = std::max(rep.scaled_gradient, u * std::fabs(localizer_derivative(j, x)));
    }
    return rep;
}

}  // namespace tracelab
