#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tracelab/corpus.hpp"
#include "tracelab/error.hpp"
#include "tracelab/norms.hpp"
#include "tracelab/poisson.hpp"

using namespace tracelab;

TEST_CASE("kernel") {
    CHECK(poisson_constant(2) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-15));
    CHECK(poisson_constant(3) == doctest::Approx(0.5 / std::numbers::pi).epsilon(1e-15));
    const double origin[1] = {0.0};
    CHECK(poisson_kernel(origin, 1.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-15));
    const double a[2] = {0.3, -0.7}, b[2] = {-0.3, 0.7};
    CHECK(poisson_kernel(a, 0.4) == poisson_kernel(b, 0.4));
    const double la[2] = {0.6, -1.4};
    CHECK(poisson_kernel(la, 0.8) == doctest::Approx(poisson_kernel(a, 0.4) / 4.0).epsilon(1e-14));
    CHECK_THROWS_AS(poisson_kernel(origin, 0.0), DomainError);
    CHECK_THROWS_AS(poisson_kernel(origin, -1.0), DomainError);
}

TEST_CASE("kernel mass") {
    // lattice sums match the continuum mass of the window once the kernel is resolved
    for (int dim : {1, 2}) {
        BoundaryGrid g(dim, 2.0, 0.05);
        for (double t : {0.1, 0.2, 0.5, 1.0}) {
            const double wm = poisson_window_mass(dim, 2.0 * g.extent() + 0.5 * g.spacing(), t);
            CHECK(std::fabs(poisson_lattice_mass(g, t) - wm) <= 1e-3);
        }
        CHECK(poisson_window_mass(dim, 1e6, 0.01) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("extension basics") {
    BoundaryGrid g(1, 3.0, 0.05);
    const auto zero = poisson_extend(BoundaryGridFunction(g), {0.1, 0.2});
    for (double v : zero.values()) CHECK(v == 0.0);
    CHECK_THROWS_AS(poisson_extend(BoundaryGridFunction(g), {-0.1, 0.2}), DomainError);

    // plateau: v(0, t) -> 1 as t -> 0
    const auto f = named_data("plateau", {1.0}).sample(g);
    const auto v = poisson_extend(f, {0.025, 0.1, 0.4});
    const std::size_t c = g.flat_index(g.half_count());
    // the plateau dominates the indicator of [-1, 1], whose extension misses 1 by (2/pi) atan(t)
    CHECK(1.0 - v.at(c, 0) <= 2.0 * 0.025 / std::numbers::pi);
    CHECK(1.0 - v.at(c, 0) >= 0.0);
    CHECK(std::fabs(v.at(c, 0) - 1.0) <= std::fabs(v.at(c, 1) - 1.0) + 1e-15);
    CHECK(std::fabs(v.at(c, 1) - 1.0) <= std::fabs(v.at(c, 2) - 1.0) + 1e-15);

    // level 0 holds f
    const auto w = poisson_extend(f, {0.0, 0.1});
    for (std::size_t i = 0; i < g.node_count(); ++i) CHECK(w.at(i, 0) == f.values[i]);
}

TEST_CASE("linearity, positivity, sup bound") {
    BoundaryGrid g(2, 1.5, 0.1);
    const auto corpus = test_corpus(11);
    const auto f = corpus[0].sample(g), k = corpus[4].sample(g);
    auto mix = f;
    for (std::size_t i = 0; i < f.values.size(); ++i) mix.values[i] = 2.0 * f.values[i] - 0.5 * k.values[i];
    const std::vector<double> lv{0.05, 0.2, 0.8};
    const auto vf = poisson_extend(f, lv), vk = poisson_extend(k, lv), vm = poisson_extend(mix, lv);
    double sup_f = 0.0;
    for (double x : f.values) sup_f = std::max(sup_f, std::fabs(x));
    for (std::size_t i = 0; i < vm.size(); ++i) {
        CHECK(vm.values()[i] == doctest::Approx(2.0 * vf.values()[i] - 0.5 * vk.values()[i]).epsilon(1e-12).scale(1.0));
        CHECK(vf.values()[i] >= 0.0);
        CHECK(std::fabs(vf.values()[i]) <= sup_f);
    }
}

TEST_CASE("maximal domination") {
    BoundaryGrid g(1, 3.0, 0.05);
    const auto lv = geometric_levels(0.0125, 1.5, 2.0);
    SUBCASE("constant data has no violation") {
        const BoundaryGridFunction c(g, 2.0);
        const auto v = poisson_extend(c, lv);
        CHECK(check_maximal_domination(v, c, RadiusLadder::standard(g)).max_violation <= 0.0);
    }
    SUBCASE("gaussian and spike") {
        for (const char* kind : {"gaussian", "indicator"}) {
            const auto f = named_data(kind, {kind[0] == 'g' ? 0.3 : 0.05}).sample(g);
            const auto v = poisson_extend(f, lv);
            const auto standard = check_maximal_domination(v, maximal_function(f));
            const auto refined = check_maximal_domination(v, f, RadiusLadder::refined(g, 4));
            CHECK(standard.max_violation <= 1e-2);
            CHECK(refined.max_violation <= standard.max_violation);
        }
    }
}

TEST_CASE("vertical maximal function is Lr bounded") {
    for (double r : {2.0, 3.0}) {
        std::vector<double> c;
        for (double h : {0.1, 0.05}) {
            BoundaryGrid g(1, 3.0, h);
            const auto f = named_data("indicator", {0.5}).sample(g);
            const auto v = poisson_extend(f, geometric_levels(h / 4, 1.5, 2.0));
            c.push_back(lp_norm(vertical_maximal(v), r) / lp_norm(f, r));
        }
        CHECK(std::isfinite(c[0]));
        CHECK(c[1] / c[0] == doctest::Approx(1.0).epsilon(0.1));
    }
}

TEST_CASE("strip growth") {
    BoundaryGrid g(1, 8.0, 0.5);
    const auto f = named_data("gaussian", {0.5}).sample(g);
    const std::vector<double> H{1.0, 2.0, 4.0};
    const auto v = poisson_extend(f, {0.0, 0.5, 1.0, 2.0, 3.0, 4.0});
    const auto t = strip_growth(v, 2.0, H);
    REQUIRE(t.rows.size() == 3);
    CHECK(std::isnan(t.rows[0].fitted_exponent));
    CHECK(t.strictly_increasing());
    CHECK_THROWS_AS(strip_growth(v, 2.0, std::vector<double>{1.5}), DomainError);
}

TEST_CASE("divergence preconditions and data") {
    const std::vector<double> H{4, 8};
    CHECK_THROWS_AS(divergence_experiment(0.4, 2.0, 2, H), DomainError);
    CHECK_THROWS_AS(divergence_experiment(1.1, 2.0, 2, H), DomainError);
    BoundaryGrid g(1, 4.0, 0.5);
    const auto c = divergence_data(g, 0.9, DivergenceData::compact_control);
    double mean = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) mean += g.weight(i) * c.values[i];
    CHECK(mean == doctest::Approx(0.0).scale(1.0));
}
