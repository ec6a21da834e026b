// Acceptance suite: one PASS/FAIL line per criterion, each with its runtime
// budget. Exit status 1 when any line fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tracelab/celliptic_operator.hpp"
#include "tracelab/celliptic_trace.hpp"
#include "tracelab/corpus.hpp"
#include "tracelab/error.hpp"
#include "tracelab/exponents.hpp"
#include "tracelab/maximal.hpp"
#include "tracelab/mollifier.hpp"
#include "tracelab/norms.hpp"
#include "tracelab/poisson.hpp"
#include "tracelab/staircase.hpp"
#include "tracelab/truncation.hpp"

using namespace tracelab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;
};

// Collects sub-checks; the first few failures go into the detail line.
class Verdict {
public:
    void require(bool ok, const std::string& what) {
        if (ok) return;
        passed_ = false;
        if (++failures_ <= 3) failed_ += (failed_.empty() ? "" : "; ") + what;
    }
    void note(const std::string& s) { notes_ += (notes_.empty() ? "" : ", ") + s; }
    Outcome finish() const {
        std::string d = notes_;
        if (!passed_) d += (d.empty() ? "" : " | ") + std::to_string(failures_) + " failed: " + failed_;
        return {passed_, d};
    }

private:
    bool passed_ = true;
    int failures_ = 0;
    std::string failed_;
    std::string notes_;
};

std::string num(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

// ---------------------------------------------------------------- criteria

Outcome exponent_identities() {
    Verdict v;
    std::mt19937_64 rng(20240601);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const double p = 1.05 + std::generate_canonical<double, 53>(rng) * (n - 1.1);
        const double q = sobolev_conjugate(p, n) * (1.05 + 3.0 * std::generate_canonical<double, 53>(rng));
        const auto e = ExponentSet::make(n, p, q);
        const auto r = identity_residuals(e);
        const double m = std::max({r.r_equals_q_minus_beta, r.holder_pairing, r.p_max_equals_r, r.limit_at_p_star});
        worst = std::max(worst, m);
        v.require(m <= 1e-12, "n=" + num(n) + " p=" + num(p) + " q=" + num(q));
    }
    v.note("50 triples, max residual " + num(worst, 3));
    return v.finish();
}

Outcome seminorm_oracle() {
    Verdict v;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    std::size_t largest = 0;
    for (int i = 0; i < 20; ++i) {
        const int dim = 1 + i % 2;
        const int m = dim == 1 ? 50 + 20 * (i / 2) : 5 + i / 2;  // at most 29^2 = 841 nodes
        BoundaryGrid g(dim, 1.0, 1.0 / m);
        BoundaryGridFunction f(g);
        for (auto& x : f.values) x = gauss(rng);
        const double s = 0.1 + 0.8 * unit(rng), p = 1.0 + 3.0 * unit(rng);
        const double a = gagliardo_seminorm(f, {s, p});
        const double b = oracle::gagliardo(f, s, p);
        const double rel = std::fabs(a - b) / b;
        worst = std::max(worst, rel);
        largest = std::max(largest, g.node_count());
        v.require(rel <= 1e-12, "case " + std::to_string(i) + " rel " + num(rel, 3));
    }
    v.note("20 functions up to " + std::to_string(largest) + " nodes, max rel diff " + num(worst, 3));
    return v.finish();
}

Outcome maximal_domination() {
    Verdict v;
    const double h = 0.05;
    const auto corpus = test_corpus(20240601);
    double worst = -1.0, worst_refined = -1.0;
    int strict = 0;
    for (int n : {2, 3}) {
        BoundaryGrid g(n - 1, n == 2 ? 3.0 : 2.0, h);
        const auto lv = geometric_levels(h / 4, 1.5, 2.0);
        const auto refined = RadiusLadder::refined(g, 4);
        for (const auto& tf : corpus) {
            const auto f = tf.sample(g);
            const auto w = poisson_extend(f, lv);
            const auto a = check_maximal_domination(w, maximal_function(f));
            const auto b = check_maximal_domination(w, f, refined);
            worst = std::max(worst, a.max_violation);
            worst_refined = std::max(worst_refined, b.max_violation);
            if (b.max_violation < a.max_violation) ++strict;
            v.require(a.max_violation <= 1e-2, tf.name + " n=" + num(n) + " gap " + num(a.max_violation));
            v.require(b.max_violation <= a.max_violation, tf.name + " n=" + num(n) + " refined gap grew");
        }
    }
    v.note("max |v|-Mf " + num(worst) + " (tol 1e-2), refined " + num(worst_refined) + ", strictly smaller in " +
           std::to_string(strict) + "/20");
    return v.finish();
}

Outcome multiplicative_inequality() {
    Verdict v;
    const auto corpus = test_corpus(20240601);
    double min_margin = 1.0, min_keep = 1e9;
    struct Triple { int n; double p, q; };
    for (const Triple t : {Triple{3, 2, 8}, Triple{3, 2, 12}, Triple{2, 1.5, 8}}) {
        const auto e = ExponentSet::make(t.n, t.p, t.q);
        const double L = t.n == 2 ? 3.0 : 1.5;
        for (const auto& tf : corpus) {
            double m[2];
            int k = 0;
            for (double h : {0.05, 0.025}) {
                BoundaryGrid g(t.n - 1, L, h);
                const auto ext = nonlinear_extend(tf.sample(g), e, truncation_levels(h, 1.25, L));
                const auto r = multiplicative_trace_inequality(ext.u, t.p, t.q);
                m[k++] = r.margin;
                v.require(r.holds && r.margin >= 0.0, tf.name + " (" + num(t.n) + "," + num(t.p) + "," + num(t.q) +
                                                          ") h=" + num(h) + " margin " + num(r.margin));
            }
            min_margin = std::min(min_margin, m[0]);
            const double keep = m[1] / m[0];
            min_keep = std::min(min_keep, keep);
            v.require(keep > 0.5, tf.name + " margin fell to " + num(keep) + " of its value");
        }
    }
    v.note("min margin at h=0.05 " + num(min_margin) + ", min retained after refinement " + num(min_keep));
    return v.finish();
}

Outcome truncation_invariants() {
    Verdict v;
    struct Case { int n; double p, q, L, width; };
    const std::vector<double> hs{0.1, 0.05, 0.025};
    std::string notes;
    for (const Case c : {Case{3, 2.0, 8.0, 1.5, 0.3}, Case{2, 1.5, 8.0, 3.0, 0.5}}) {
        const auto e = ExponentSet::make(c.n, c.p, c.q);
        std::vector<double> chief, recovery;
        for (double h : hs) {
            BoundaryGrid g(c.n - 1, c.L, h);
            const auto f = named_data("gaussian", {c.width}).sample(g);
            const auto ext = nonlinear_extend(f, e, truncation_levels(h, 1.25, c.L));
            const auto Mf = maximal_function(f);
            const auto sup = support_check(ext);
            v.require(sup.passed, "support n=" + num(c.n) + " h=" + num(h) + " max psi " + num(sup.value));
            const auto pw = pointwise_bound_check(ext, Mf);
            v.require(pw.row.passed, "pointwise n=" + num(c.n) + " h=" + num(h) + " excess " + num(pw.row.value));
            const auto cb = chief_bound_check(ext, std::size_t{1} << 15);
            v.require(std::isfinite(cb.ratio) && cb.ratio > 0.0, "chief ratio not finite");
            chief.push_back(cb.ratio);
            recovery.push_back(trace_recovery_check(ext).l1_error);
        }
        for (std::size_t k = 1; k < hs.size(); ++k) {
            const double factor = recovery[k - 1] / recovery[k];
            v.require(factor >= 1.5 && factor <= 3.0, "recovery factor " + num(factor) + " n=" + num(c.n));
            const double drift = std::fabs(chief[k] / chief[0] - 1.0);
            v.require(drift <= 0.2, "chief drift " + num(drift) + " n=" + num(c.n));
        }
        v.note("n=" + num(c.n) + " chief " + num(chief[0]) + "/" + num(chief[1]) + "/" + num(chief[2]) +
               " recovery factors " + num(recovery[0] / recovery[1], 3) + "," + num(recovery[1] / recovery[2], 3));
    }
    return v.finish();
}

Outcome continuity_surrogate() {
    Verdict v;
    const double h = 0.0025, L = 4.0, p = 1.5, q = 8.0;
    const auto e = ExponentSet::make(2, p, q);
    BoundaryGrid g(1, L, h);
    const auto f = named_data("indicator", {0.5}).sample(g);
    const auto lv = truncation_levels(h, 1.25, L);
    std::vector<HalfSpaceField> us;
    for (double d = 0.32; d >= 0.01 * 0.999; d /= 2) us.push_back(nonlinear_extend(mollify(f, d), e, lv).u);
    std::vector<double> dist;
    for (std::size_t k = 0; k + 1 < us.size(); ++k) dist.push_back(lifting_distance(us[k], us[k + 1], p, q));
    std::string s;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        s += (k ? "," : "") + num(dist[k]);
        if (k) v.require(dist[k] < dist[k - 1], "distance " + std::to_string(k) + " did not decrease");
    }
    v.note("successive distances " + s);
    return v.finish();
}

Outcome divergence() {
    Verdict v;
    const std::vector<double> H{4, 8, 16, 32};
    const auto grow = divergence_experiment(0.9, 2.0, 2, H);
    DivergenceSetup cs;
    cs.data = DivergenceData::compact_control;
    const auto ctrl = divergence_experiment(0.9, 2.0, 2, H, cs);
    v.require(grow.strictly_increasing(), "strip norms not strictly increasing");
    v.require(grow.last_over_first() >= 2.0, "growth ratio " + num(grow.last_over_first()));
    v.require(ctrl.last_over_first() <= 1.2, "control ratio " + num(ctrl.last_over_first()));
    v.note("growth ratio " + num(grow.last_over_first()) + " (>= 2), control " + num(ctrl.last_over_first()) +
           " (<= 1.2)");
    return v.finish();
}

Outcome staircase() {
    Verdict v;
    // q = 2 needs q > n/(n-1), so it runs with n = 3; n = 2 covers q = 3 and q = ∞.
    struct Case { int n; Integrability q; double h; };
    double worst_layer = 0.0;
    for (const Case c : {Case{3, Integrability::finite(2.0), 0.04}, Case{3, Integrability::infinity(), 0.04},
                         Case{2, Integrability::finite(3.0), 0.01}, Case{2, Integrability::infinity(), 0.01}}) {
        BoundaryGrid g(c.n - 1, 4.0, c.h);
        const auto f = named_data("indicator", {1.0}).sample(g);
        const auto field = staircase_extend(f, c.q, 6);
        const auto b = staircase_bounds_check(field);
        const double F = field.sequence.f_l1;
        const std::string tag = " n=" + num(c.n) + " q=" + (c.q.is_infinite() ? "inf" : num(c.q.value()));
        worst_layer = std::max(worst_layer, b.layer_value_error);
        v.require(b.layer_value_error == 0.0, "layer error " + num(b.layer_value_error) + tag);
        v.require(b.trace_errors.size() == 7, "layer count" + tag);
        for (std::size_t j = 0; j < b.trace_errors.size(); ++j)
            v.require(b.trace_errors[j] <= std::ldexp(F, -static_cast<int>(j)), "trace j=" + std::to_string(j) + tag);
        v.require(b.normal_l1 <= 3.0 * F, "normal derivative" + tag);
        if (c.q.is_infinite()) {
            v.require(b.sup_u <= b.sup_f, "sup bound" + tag);
        } else {
            const double q = c.q.value();
            v.require(b.lq_power <= (std::pow(2.0, q) + 1.0) * std::pow(F, q), "lq bound" + tag);
        }
    }
    v.note("layer error " + num(worst_layer) + ", trace/normal/lq/sup bounds at J=6");
    return v.finish();
}

FieldComponents even_gaussian_field(const DiffOperator& op, const BoundaryGrid& g, const std::vector<double>& lv) {
    FieldComponents u;
    for (int c = 0; c < op.N; ++c)
        u.push_back(sample_half_space(
            [c](std::span<const double> x, double t) {
                const double r2 = x[0] * x[0] + t * t;
                return (c == 0 ? 1.0 : 0.5 * x[0] + 0.3) * std::exp(-r2 / (2 * 0.4 * 0.4));
            },
            g, lv));
    return u;
}

Outcome celliptic() {
    Verdict v;
    const auto grad = DiffOperator::gradient(2);
    const auto sym = DiffOperator::symmetric_gradient_2d();
    const auto cr = DiffOperator::cauchy_riemann();

    const Cube unit{2, {0.0, 1.0, 0.0}, 1.0};
    const auto gb = kernel_basis(grad, unit);
    const auto sb = kernel_basis(sym, unit);
    v.require(gb.size() == 1, "gradient kernel dim " + std::to_string(gb.size()));
    v.require(sb.size() == 3 && sb.degree == 1, "symmetric gradient kernel dim " + std::to_string(sb.size()) +
                                                    " at degree " + std::to_string(sb.degree));
    v.require(is_c_elliptic(grad).likely_elliptic && is_c_elliptic(sym).likely_elliptic, "ellipticity verdict");
    v.require(!is_c_elliptic(cr).likely_elliptic, "Cauchy-Riemann reported C-elliptic");
    bool cr_failed = false;
    try {
        kernel_basis(cr, unit);
    } catch (const ConvergenceError&) {
        cr_failed = true;
    }
    v.require(cr_failed, "Cauchy-Riemann stabilization failure not detected");

    const double h = std::ldexp(1.0, -8);
    BoundaryGrid g(1, 2.0, h);
    const auto lv = uniform_levels(h, 460, true);

    // projection reproduction and idempotence on a mid-sized cube
    double proj_err = 0.0;
    for (const auto* op : {&grad, &sym}) {
        const Cube Q{2, {0.1, 0.5, 0.0}, 0.5};
        const auto b = kernel_basis(*op, Q);
        const auto quad = cube_quadrature(g, lv, Q, b.degree);
        std::vector<double> coeff;
        for (std::size_t i = 0; i < b.size(); ++i) coeff.push_back(0.7 - 0.4 * static_cast<double>(i));
        const auto back = project_coefficients(sample_polynomial(b, coeff, g, lv), b, quad);
        const auto again = project_coefficients(sample_polynomial(b, back, g, lv), b, quad);
        for (std::size_t i = 0; i < coeff.size(); ++i) {
            proj_err = std::max(proj_err, std::fabs(back[i] - coeff[i]));
            proj_err = std::max(proj_err, std::fabs(again[i] - back[i]));
        }
    }
    v.require(proj_err <= 1e-10, "projection error " + num(proj_err));

    std::string trace_note;
    for (const auto* op : {&grad, &sym}) {
        const auto u = even_gaussian_field(*op, g, lv);
        const auto run = replacement_trace(u, *op, 6, {.j_min = 2});
        const double rel = run.last().l1_error / run.boundary_l1;
        v.require(rel < 1e-2, op->name + " trace error " + num(rel));
        const auto tb = trace_bounds_check(run, u);
        v.require(std::isfinite(tb.linf_max) && tb.linf_min > 0.0 && tb.linf_max / tb.linf_min <= 1.5,
                  op->name + " linf ratio spread " + num(tb.linf_min) + ".." + num(tb.linf_max));
        trace_note += op->name + " rel err " + num(rel, 3) + " linf [" + num(tb.linf_min, 3) + "," +
                      num(tb.linf_max, 3) + "] ";
    }

    // constants over 4 dyadic octaves of cube size
    const auto lvc = uniform_levels(h, 600, true);
    for (const auto* op : {&grad, &sym}) {
        std::vector<double> ne, ie;
        for (int k = 0; k < 4; ++k) {
            const double side = std::ldexp(1.0, -k);
            const Cube Q{2, {0.1, 1.75 * side, 0.0}, side};
            const auto b = kernel_basis(*op, Q);
            ne.push_back(norm_equivalence_constant(b, Q));
            ie.push_back(inverse_estimate_constant(b, g, lvc));
        }
        const auto drift = [](const std::vector<double>& c) {
            const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
            return *hi / *lo - 1.0;
        };
        v.require(drift(ne) <= 0.1, op->name + " norm equivalence drift " + num(drift(ne)));
        v.require(drift(ie) <= 0.1, op->name + " inverse estimate drift " + num(drift(ie)));
        trace_note += op->name + " drift " + num(drift(ne), 2) + "/" + num(drift(ie), 2) + " ";
    }
    v.note("kernel dims 1/3, CR failure detected, projection err " + num(proj_err, 2) + "; " + trace_note);
    return v.finish();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism(const std::string& cli, const fs::path& configs, const fs::path& scratch) {
    Verdict v;
    std::size_t files = 0, runs = 0;
    std::vector<fs::path> inis;
    for (const auto& entry : fs::directory_iterator(configs))
        if (entry.path().extension() == ".ini") inis.push_back(entry.path());
    std::sort(inis.begin(), inis.end());
    for (const auto& ini : inis) {
        std::string experiment;
        {
            std::ifstream in(ini);
            std::string line;
            while (std::getline(in, line))
                if (line.rfind("experiment", 0) == 0) experiment = line.substr(line.find('=') + 1);
            experiment.erase(0, experiment.find_first_not_of(" \t"));
            experiment.erase(experiment.find_last_not_of(" \t\r") + 1);
        }
        if (experiment.empty()) continue;
        std::vector<fs::path> dirs;
        for (const char* threads : {"1", "4"}) {
            const auto dir = scratch / (ini.stem().string() + "_t" + threads);
            fs::remove_all(dir);
            fs::create_directories(dir);
            const std::string cmd = "TRACELAB_THREADS=" + std::string(threads) + " '" + cli + "' " + experiment +
                                    " --config '" + ini.string() + "' --out '" + dir.string() + "' > '" +
                                    (dir / "stdout.txt").string() + "' 2>&1";
            const int rc = std::system(cmd.c_str());
            ++runs;
            v.require(rc != -1 && WEXITSTATUS(rc) <= 1, ini.stem().string() + " exited with " + std::to_string(rc));
            dirs.push_back(dir);
        }
        for (const auto& entry : fs::directory_iterator(dirs[0])) {
            const auto name = entry.path().filename();
            if (name.extension() != ".csv") continue;
            ++files;
            v.require(fs::exists(dirs[1] / name) && slurp(entry.path()) == slurp(dirs[1] / name),
                      ini.stem().string() + "/" + name.string() + " differs");
        }
        std::size_t second = 0;
        for (const auto& entry : fs::directory_iterator(dirs[1])) second += entry.path().extension() == ".csv";
        v.require(second == static_cast<std::size_t>(std::count_if(fs::directory_iterator(dirs[0]), fs::directory_iterator{},
                                                                   [](const auto& e) { return e.path().extension() == ".csv"; })),
                  ini.stem().string() + " file sets differ");
    }
    v.require(files > 0, "no CSV output");
    v.note(std::to_string(runs) + " runs (1 and 4 threads), " + std::to_string(files) + " CSV files identical");
    return v.finish();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tracelab acceptance suite"};
    std::string cli, configs, scratch = "acceptance_runs";
    std::vector<std::string> only;
    app.add_option("--cli", cli, "path to the tracelab executable")->required();
    app.add_option("--configs", configs, "directory of experiment configs")->required()->check(CLI::ExistingDirectory);
    app.add_option("--scratch", scratch, "output directory for CLI runs");
    app.add_option("--only", only, "run only criteria whose name contains one of these");
    CLI11_PARSE(app, argc, argv);

    struct Criterion {
        std::string name;
        double budget;  // seconds
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"exponent_identities", 1, exponent_identities},
        {"seminorm_oracle", 30, seminorm_oracle},
        {"maximal_domination", 120, maximal_domination},
        {"multiplicative_inequality", 120, multiplicative_inequality},
        {"truncation_invariants", 300, truncation_invariants},
        {"continuity_surrogate", 300, continuity_surrogate},
        {"divergence", 120, divergence},
        {"staircase", 120, staircase},
        {"celliptic", 600, celliptic},
        {"determinism", 600, [&] { return determinism(cli, configs, scratch); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::none_of(only.begin(), only.end(),
                                          [&](const std::string& o) { return c.name.find(o) != std::string::npos; }))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = o.passed && dt < c.budget;
        if (!ok) ++failed;
        std::printf("%s %-26s %7.2fs / %4.0fs  %s%s\n", ok ? "PASS" : "FAIL", c.name.c_str(), dt, c.budget,
                    o.detail.c_str(), dt < c.budget ? "" : " | over budget");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
