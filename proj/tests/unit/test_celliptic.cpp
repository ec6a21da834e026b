#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tracelab/celliptic_cover.hpp"
#include "tracelab/celliptic_operator.hpp"
#include "tracelab/celliptic_trace.hpp"
#include "tracelab/error.hpp"

using namespace tracelab;

TEST_CASE("ellipticity verdicts") {
    CHECK(is_c_elliptic(DiffOperator::gradient(2), 2000).likely_elliptic);
    CHECK(is_c_elliptic(DiffOperator::gradient(3), 2000).likely_elliptic);
    CHECK(is_c_elliptic(DiffOperator::symmetric_gradient_2d(), 2000).likely_elliptic);
    const auto cr = is_c_elliptic(DiffOperator::cauchy_riemann(), 2000);
    CHECK_FALSE(cr.likely_elliptic);
    CHECK(cr.min_singular < ellipticity_threshold);
    REQUIRE(cr.witness.size() == 2);
    // the witness is (1, ±i) up to a complex scale
    const Complex ratio = cr.witness[1] / cr.witness[0];
    CHECK(std::abs(ratio.real()) < 1e-8);
    CHECK(std::abs(std::abs(ratio.imag()) - 1.0) < 1e-8);
    CHECK(symbol_min_singular(DiffOperator::cauchy_riemann(), cr.witness) < 1e-12);
}

TEST_CASE("kernel dimensions") {
    CHECK(kernel_dimensions(DiffOperator::gradient(2), 3) == std::vector<int>{1, 1, 1, 1});
    CHECK(kernel_dimensions(DiffOperator::symmetric_gradient_2d(), 3) == std::vector<int>{2, 3, 3, 3});
    CHECK(kernel_dimensions(DiffOperator::cauchy_riemann(), 3) == std::vector<int>{2, 4, 6, 8});
    CHECK_THROWS_AS(kernel_basis(DiffOperator::cauchy_riemann(), Cube{2, {0, 1, 0}, 1.0}), ConvergenceError);
}

TEST_CASE("basis is orthonormal and reproduces the kernel") {
    const Cube Q{2, {0.5, 0.5, 0.0}, 1.0};
    const auto b = kernel_basis(DiffOperator::symmetric_gradient_2d(), Q);
    CHECK(b.size() == 3);
    CHECK(b.operator_residual() < 1e-12);
    std::vector<double> x, w;
    gauss_legendre(8, x, w);
    const std::size_t N = 2, K = b.size();
    std::vector<double> G(K * K, 0.0), vals(K * N);
    for (std::size_t a = 0; a < x.size(); ++a)
        for (std::size_t c = 0; c < x.size(); ++c) {
            const double pt[3] = {0.5 + 0.5 * x[a], 0.5 + 0.5 * x[c], 0.0};
            b.evaluate_all(pt, vals.data());
            const double wt = 0.25 * w[a] * w[c];
            for (std::size_t i = 0; i < K; ++i)
                for (std::size_t k = 0; k < K; ++k)
                    for (std::size_t m = 0; m < N; ++m) G[i * K + k] += wt * vals[i * N + m] * vals[k * N + m];
        }
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t k = 0; k < K; ++k) CHECK(G[i * K + k] == doctest::Approx(i == k ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("projection on grid data") {
    const double h = 1.0 / 64;
    BoundaryGrid g(1, 1.0, h);
    const auto lv = uniform_levels(h, 64, true);
    const Cube Q{2, {0.5, 0.5, 0.0}, 1.0};
    const auto op = DiffOperator::gradient(2);
    const auto b = kernel_basis(op, Q);
    REQUIRE(b.size() == 1);
    const FieldComponents u{sample_half_space([](std::span<const double> x, double) { return x[0]; }, g, lv)};
    const auto c = project_coefficients(u, b, cube_quadrature(g, lv, Q, 2));
    double out = 0.0;
    const double center[3] = {0.5, 0.5, 0.0};
    evaluate_projection(b, c, center, &out);
    CHECK(out == doctest::Approx(0.5).epsilon(1e-12));

    // kernel elements are reproduced and the projection is idempotent
    const auto rigid = DiffOperator::symmetric_gradient_2d();
    const auto rb = kernel_basis(rigid, Q);
    const std::vector<double> coeff{0.3, -1.2, 0.7};
    const auto field = sample_polynomial(rb, coeff, g, lv);
    const auto quad = cube_quadrature(g, lv, Q, rb.degree);
    const auto back = project_coefficients(field, rb, quad);
    for (std::size_t i = 0; i < coeff.size(); ++i) CHECK(back[i] == doctest::Approx(coeff[i]).epsilon(1e-10));
    const auto again = project_coefficients(sample_polynomial(rb, back, g, lv), rb, quad);
    for (std::size_t i = 0; i < coeff.size(); ++i) CHECK(again[i] == doctest::Approx(back[i]).epsilon(1e-10));

    CHECK_THROWS_AS(cube_quadrature(g, lv, Cube{2, {0.5, 0.5, 0.0}, 2 * h}, 2), ResourceError);
}

TEST_CASE("moment-corrected weights") {
    std::vector<double> nodes;
    for (int i = 0; i <= 10; ++i) nodes.push_back(0.1 * i);
    const auto w = moment_corrected_weights(nodes, 0.03, 0.97, 4);
    for (int d = 0; d <= 4; ++d) {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += w[i] * std::pow(nodes[i], d);
        CHECK(s == doctest::Approx((std::pow(0.97, d + 1) - std::pow(0.03, d + 1)) / (d + 1)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(moment_corrected_weights(std::vector<double>{0.0, 1.0}, 0.0, 1.0, 4), DomainError);
}

TEST_CASE("cover and partition of unity") {
    for (int n : {2, 3}) {
        const auto cover = build_cover(3, n, {-1.0, -1.0, 0.0}, {1.0, 1.0, 1.0});
        const auto rep = check_cover(cover, 2000);
        CHECK(rep.covers);
        CHECK(rep.max_overlap <= (1 << n));
        CHECK(rep.generic_overlap == (n == 2 ? 4 : 8));
        // smallest overlap is a (u/2)^n corner, largest a full (3u/2)^n cube
        CHECK(rep.intersection_constant == doctest::Approx(1 << n));
        const double x[3] = {0.3, 0.2, 0.4};
        CHECK(cover.containing(x).size() >= 1);
        PartitionOfUnity pou(cover);
        CHECK(pou.sum(x) == doctest::Approx(1.0).epsilon(1e-14));
        const auto pr = check_partition(pou, 2000);
        CHECK(pr.max_sum_error < 1e-12);
        CHECK(pr.min_value >= 0.0);
        CHECK(pr.scaled_gradient <= 3.75 * n);
    }
    CHECK(pou_profile(0.0) == 1.0);
    CHECK(pou_profile(0.8) == 0.0);
    CHECK(pou_profile(0.4) + pou_profile(-0.6) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("localizer") {
    CHECK(localizer(2, 0.0) == 1.0);
    CHECK(localizer(2, 0.5) == 0.0);
    CHECK(localizer(2, 1.0 / 8) == 1.0);
    const auto rep = check_localizer(3, 2000);
    CHECK(rep.sandwich);
    CHECK(rep.scaled_gradient <= 2.0 * 1.875 + 1e-12);
}

TEST_CASE("replacement trace") {
    const double h = 1.0 / 64;
    BoundaryGrid g(1, 1.0, h);
    const auto lv = uniform_levels(h, 64, true);
    const auto op = DiffOperator::symmetric_gradient_2d();

    SUBCASE("zero field") {
        const FieldComponents u{HalfSpaceField(g, lv), HalfSpaceField(g, lv)};
        const auto run = replacement_trace(u, op, 3, {.j_min = 2});
        for (const auto& it : run.iterates) CHECK(it.l1_trace_norm == 0.0);
    }
    SUBCASE("rigid motion is reproduced away from the box edges") {
        const FieldComponents u{
            sample_half_space([](std::span<const double>, double t) { return 0.3 - 0.5 * t; }, g, lv),
            sample_half_space([](std::span<const double> x, double) { return 0.2 + 0.5 * x[0]; }, g, lv)};
        const auto run = replacement_trace(u, op, 3, {.j_min = 2});
        const auto& tr = run.last().trace;
        for (int i = g.half_count() / 2; i <= 3 * g.half_count() / 2; ++i) {
            const std::size_t node = g.flat_index(i);
            CHECK(tr[0].values[node] == doctest::Approx(0.3).epsilon(1e-9));
            CHECK(tr[1].values[node] == doctest::Approx(0.2 + 0.5 * g.coordinate(i)).epsilon(1e-9));
        }
    }
}
