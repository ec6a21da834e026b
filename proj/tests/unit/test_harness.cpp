#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tracelab/config.hpp"
#include "tracelab/error.hpp"
#include "tracelab/harness.hpp"

using namespace tracelab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("tracelab_harness_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* small_poisson = R"(experiment = poisson
[grid]
n = 2
L = 1
h = 0.1
[levels]
h_min_factor = 0.25
ratio = 1.5
max = 1
[data]
kind = gaussian
width = 0.3
)";

}  // namespace

TEST_CASE("config parsing") {
    const auto c = Config::parse("a = 1\n[grid]\nh = 0.1, 0.05\nname = x\nflag = true\n");
    CHECK(c.get_int("a") == 1);
    CHECK(c.get_doubles("grid.h") == std::vector<double>{0.1, 0.05});
    CHECK(c.get_string("grid.name") == "x");
    CHECK(c.get_bool("grid.flag"));
    CHECK(c.get_double("missing", 2.5) == 2.5);
    CHECK_THROWS_AS(c.get_double("missing"), DomainError);
    CHECK_THROWS_AS(c.get_double("grid.name"), DomainError);
    CHECK(c.unused_keys().empty());
    CHECK(Config::parse("x = 1\ny = 2\n").unused_keys().size() == 2);
    CHECK(split_list(" a , ,b ") == std::vector<std::string>{"a", "b"});
    try {
        Config::parse("a = 1\n[broken\n");
        FAIL("no throw");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
    CHECK_THROWS_AS(Config::load("/nonexistent/tracelab.ini"), ParseError);
}

TEST_CASE("check groups") {
    CHECK(harness::check_group("replacement_trace_error_j4") == "replacement_trace_error");
    CHECK(harness::check_group("support") == "support");
    CHECK(harness::check_group("x_j") == "x_j");
    CHECK(harness::experiment_names().size() == 7);
}

TEST_CASE("unknown experiments and keys are rejected") {
    const auto dir = scratch("reject");
    CHECK_THROWS_AS(harness::run("nope", Config::parse(small_poisson), {dir.string()}), DomainError);
    auto c = Config::parse(std::string(small_poisson) + "typo = 3\n");
    CHECK_THROWS_AS(harness::run("poisson", c, {dir.string()}), DomainError);
    auto bad = Config::parse(small_poisson);
    bad.set("grid.n", "5");
    CHECK_THROWS_AS(harness::run("poisson", bad, {dir.string()}), DomainError);
    CHECK(fs::is_empty(dir));
}

TEST_CASE("poisson run writes its tables") {
    const auto dir = scratch("poisson");
    const auto r = harness::run("poisson", Config::parse(small_poisson), {dir.string()});
    CHECK(r.exit_status == 0);
    CHECK_FALSE(r.summary.empty());
    for (const auto& s : r.summary) CHECK_MESSAGE(s.passed(), s.check);
    for (const auto& f : r.files) CHECK(fs::exists(dir / f));
    CHECK(fs::exists(dir / "summary.csv"));
    const auto header = slurp(dir / "check_maximal_domination.csv");
    CHECK(header.rfind("check_name,n,p,q,r,beta,h,value,bound,margin,passed\n", 0) == 0);
}

TEST_CASE("hard checks decide the exit status") {
    const auto dir = scratch("hard");
    auto c = Config::parse(small_poisson);
    c.set("tol.domination", "-1");  // impossible: every point must beat Mf by 1
    c.set("checks.hard", "none");
    CHECK(harness::run("poisson", c, {dir.string()}).exit_status == 0);
    auto c2 = Config::parse(small_poisson);
    c2.set("tol.domination", "-1");
    CHECK(harness::run("poisson", c2, {dir.string()}).exit_status == 1);
}

TEST_CASE("exponent table and seed override") {
    const auto a = scratch("exp_a"), b = scratch("exp_b");
    const auto c = Config::parse("[exp]\nn = 3\np = 2\nq = 12\nrandom = 5\n");
    const auto ra = harness::run("exponents", c, {a.string(), 7});
    const auto rb = harness::run("exponents", c, {b.string(), 7});
    CHECK(ra.exit_status == 0);
    CHECK(slurp(a / "exponents.csv") == slurp(b / "exponents.csv"));
    const auto d = scratch("exp_d");
    harness::run("exponents", c, {d.string(), 8});
    CHECK(slurp(a / "exponents.csv") != slurp(d / "exponents.csv"));
}
