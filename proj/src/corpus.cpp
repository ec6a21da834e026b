#include "tracelab/corpus.hpp"

#include <cmath>
#include <random>

#include "tracelab/cutoff.hpp"
#include "tracelab/error.hpp"

namespace tracelab {
namespace {

double norm2(std::span<const double> x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return r2;
}

TestFunction gaussian(double sigma) {
    return {"gaussian", [sigma](std::span<const double> x) { return std::exp(-norm2(x) / (2.0 * sigma * sigma)); }};
}

TestFunction indicator(double radius) {
    return {"indicator", [radius](std::span<const double> x) { return norm2(x) < radius * radius ? 1.0 : 0.0; }};
}

// 1 on the ball of the given radius, smooth ramp to 0 over one more radius.
TestFunction plateau(double radius) {
    return {"plateau", [radius](std::span<const double> x) {
                return 1.0 - smoothstep(std::sqrt(norm2(x)) / radius - 1.0);
            }};
}

TestFunction power_decay(double alpha) {
    return {"power-decay", [alpha](std::span<const double> x) { return std::pow(1.0 + std::sqrt(norm2(x)), -alpha); }};
}

struct Bump {
    double amp, sigma;
    double c0, c1;
};

TestFunction bump_sum(std::string name, std::mt19937_64& rng, int count) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0), sig(0.1, 0.4), ctr(-0.6, 0.6);
    std::vector<Bump> bumps;
    for (int i = 0; i < count; ++i) {
        // evaluation order fixed so the draw sequence does not depend on the compiler
        const double a = amp(rng);
        const double s = sig(rng);
        const double c0 = ctr(rng);
        const double c1 = ctr(rng);
        bumps.push_back({a, s, c0, c1});
    }
    return {std::move(name), [bumps](std::span<const double> x) {
                double acc = 0.0;
                for (const auto& b : bumps) {
                    double r2 = (x[0] - b.c0) * (x[0] - b.c0);
                    if (x.size() > 1) r2 += (x[1] - b.c1) * (x[1] - b.c1);
                    acc += b.amp * std::exp(-r2 / (2.0 * b.sigma * b.sigma));
                }
                return acc;
            }};
}

}  // namespace

TestFunction named_data(const std::string& kind, const DataParams& params) {
    if (!(params.width > 0.0) || !std::isfinite(params.width)) throw DomainError("data width must be positive");
    if (kind == "gaussian") return gaussian(params.width);
    if (kind == "indicator") return indicator(params.width);
    if (kind == "plateau") return plateau(params.width);
    if (kind == "power-decay") {
        if (!(params.alpha > 0.0)) throw DomainError("power-decay alpha must be positive");
        return power_decay(params.alpha);
    }
    throw DomainError("unknown data kind '" + kind + "'");
}

std::vector<TestFunction> test_corpus(std::uint64_t seed) {
    std::vector<TestFunction> out;
    out.push_back(gaussian(0.3));
    out.push_back(indicator(0.5));
    out.push_back(plateau(0.3));
    out.push_back({"power-decay", [](std::span<const double> x) { return std::pow(1.0 + 4.0 * std::sqrt(norm2(x)), -3.0); }});
    out.push_back({"odd-gaussian", [](std::span<const double> x) {
                       return (x[0] > 0.0 ? 1.0 : x[0] < 0.0 ? -1.0 : 0.0) * std::exp(-norm2(x) / 0.08);
                   }});
    out.push_back({"small-square", [](std::span<const double> x) {
                       for (double c : x)
                           if (std::fabs(c) > 0.1) return 0.0;
                       return 1.0;
                   }});
    out.push_back({"oscillating", [](std::span<const double> x) {
                       return std::cos(6.0 * x[0]) * std::pow(1.0 + 4.0 * std::sqrt(norm2(x)), -3.0);
                   }});
    out.push_back({"cone", [](std::span<const double> x) { return std::max(0.0, 1.0 - std::sqrt(norm2(x))); }});
    std::mt19937_64 rng(seed);
    out.push_back(bump_sum("bumps-a", rng, 3));
    out.push_back(bump_sum("bumps-b", rng, 5));
    return out;
}

}  // namespace tracelab
