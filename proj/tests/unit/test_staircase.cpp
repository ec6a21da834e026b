#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tracelab/corpus.hpp"
#include "tracelab/error.hpp"
#include "tracelab/norms.hpp"
#include "tracelab/staircase.hpp"

using namespace tracelab;

TEST_CASE("power mean") {
    CHECK(linear_power_mean(1.0, 1.0, 3.0) == doctest::Approx(1.0));
    CHECK(linear_power_mean(0.0, 1.0, 2.0) == doctest::Approx(1.0 / 3.0));
    CHECK(linear_power_mean(-1.0, 1.0, 2.0) == doctest::Approx(1.0 / 3.0));
    CHECK(linear_power_mean(-1.0, 1.0, 1.0) == doctest::Approx(0.5));
    CHECK(linear_power_mean(2.0, 0.0, 3.0) == doctest::Approx(2.0));
}

TEST_CASE("approximants") {
    BoundaryGrid g(1, 4.0, 0.01);
    const auto f = named_data("indicator", {1.0}).sample(g);
    const auto seq = build_approximants(f, 6);
    REQUIRE(seq.layers() == 6);
    for (double v : seq.members[0].values) CHECK(v == 0.0);
    CHECK(seq.errors[0] == doctest::Approx(seq.f_l1));
    for (int j = 1; j <= 6; ++j) CHECK(seq.errors[j] <= std::ldexp(seq.f_l1, -j) * (1 + 1e-12));
    CHECK(seq.errors[3] <= seq.f_l1 / 8.0);
}

TEST_CASE("zero data") {
    BoundaryGrid g(1, 2.0, 0.05);
    const BoundaryGridFunction zero(g);
    const auto seq = build_approximants(zero, 3);
    CHECK(seq.f_l1 == 0.0);
    CHECK_THROWS_AS(build_schedule(seq, Integrability::finite(3.0)), DomainError);
}

TEST_CASE("schedule") {
    BoundaryGrid g(1, 4.0, 0.01);
    const auto f = named_data("indicator", {1.0}).sample(g);
    const auto seq = build_approximants(f, 6);
    const auto s = build_schedule(seq, Integrability::finite(3.0));
    const double F = seq.f_l1;
    REQUIRE(s.layers() == 6);
    CHECK(s.data_scale == doctest::Approx(F * F * F));
    for (int j = 0; j < 6; ++j) CHECK(s.heights[j + 1] < s.heights[j]);
    CHECK(s.heights[0] <= s.data_scale);
    CHECK(s.heights.back() == doctest::Approx(std::ldexp(s.data_scale, -6) / (1.0 + 2.0 * s.gammas.back() + s.data_scale)));
    CHECK(s.heights.back() / s.heights.front() < 0.02);
}

TEST_CASE("staircase bounds") {
    struct Case { int n; Integrability q; double h; };
    for (const Case c : {Case{2, Integrability::finite(3.0), 0.02}, Case{2, Integrability::infinity(), 0.02},
                         Case{3, Integrability::finite(2.0), 0.08}}) {
        BoundaryGrid g(c.n - 1, 4.0, c.h);
        const auto f = named_data("indicator", {1.0}).sample(g);
        const auto field = staircase_extend(f, c.q, 6);
        const auto b = staircase_bounds_check(field);
        const double F = field.sequence.f_l1;
        CHECK(b.layer_value_error <= 1e-12);
        CHECK(b.strip_excess <= 1e-12);
        CHECK(b.linearity_defect <= 1e-10);
        CHECK(b.normal_l1 <= 3.0 * F * (1 + 1e-12));
        CHECK(b.sup_u <= b.sup_f + 1e-15);
        if (!c.q.is_infinite()) {
            const double q = c.q.value();
            CHECK(b.lq_power <= (std::pow(2.0, q) + 1.0) * std::pow(F, q));
        }
        for (std::size_t j = 0; j < b.trace_errors.size(); ++j)
            CHECK(b.trace_errors[j] <= std::ldexp(F, -static_cast<int>(j)) * (1 + 1e-12));
        for (const auto& row : b.rows(field)) CHECK_MESSAGE(row.passed, row.check_name);
        // layers reproduce the approximants
        for (int j = 1; j <= 6; ++j) {
            const std::size_t node = g.node_count() / 2;
            CHECK(field.evaluate(node, field.schedule.heights[j]) ==
                  doctest::Approx(field.sequence.members[j].values[node]).epsilon(1e-14));
        }
        CHECK(field.evaluate(0, field.schedule.heights[0] * 1.5) == 0.0);
    }
}

TEST_CASE("exponent range") {
    BoundaryGrid g(1, 2.0, 0.05);
    const auto f = named_data("indicator", {0.5}).sample(g);
    CHECK_THROWS_AS(staircase_extend(f, Integrability::finite(2.0), 3), DomainError);
    CHECK_THROWS_AS(staircase_extend(f, Integrability::finite(1.5), 3), DomainError);
}
