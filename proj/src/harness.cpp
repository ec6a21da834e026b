#include "tracelab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "tracelab/celliptic_cover.hpp"
#include "tracelab/celliptic_operator.hpp"
#include "tracelab/celliptic_trace.hpp"
#include "tracelab/corpus.hpp"
#include "tracelab/error.hpp"
#include "tracelab/exponents.hpp"
#include "tracelab/grid_io.hpp"
#include "tracelab/maximal.hpp"
#include "tracelab/mollifier.hpp"
#include "tracelab/norms.hpp"
#include "tracelab/poisson.hpp"
#include "tracelab/staircase.hpp"
#include "tracelab/truncation.hpp"

namespace tracelab::harness {
namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------- output

class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ResourceError("cannot write " + path.string());
        write_row(out, header_);
        for (const auto& r : rows_) write_row(out, r);
    }

private:
    static void write_row(std::ostream& os, const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string fmt(double x) { return format_double(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }
std::string fmt(int x) { return std::to_string(x); }

CheckRow make_row(std::string name, int n, double value, double bound, bool passed) {
    CheckRow row;
    row.check_name = std::move(name);
    row.n = n;
    row.value = value;
    row.bound = bound;
    row.margin = relative_margin(value, bound);
    row.passed = passed;
    return row;
}

CheckRow with_exponents(CheckRow row, double p, double q, double h) {
    row.p = p;
    row.q = q;
    row.h = h;
    if (p > 1.0 && std::isfinite(q) && q > p) {
        row.r = trace_exponent(p, q);
        row.beta = beta_exponent(p, q);
    }
    return row;
}

// Collects check rows and tables, writes them at the end.
class Output {
public:
    explicit Output(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void check(CheckRow row) { rows_.push_back(std::move(row)); }
    void checks(const std::vector<CheckRow>& rows) {
        for (const auto& r : rows) check(r);
    }
    void table(const std::string& file, Table t) { tables_.emplace_back(file, std::move(t)); }

    RunResult finish(const std::string& experiment, const std::vector<std::string>& hard) {
        std::filesystem::create_directories(dir_);
        RunResult res;
        res.experiment = experiment;
        res.checks = rows_;
        for (const auto& [file, t] : tables_) {
            t.write(dir_ / file);
            res.files.push_back(file);
        }
        std::vector<std::string> groups;
        std::map<std::string, std::vector<const CheckRow*>> by_group;
        for (const auto& r : rows_) {
            const auto g = check_group(r.check_name);
            if (!by_group.count(g)) groups.push_back(g);
            by_group[g].push_back(&r);
        }
        const bool all_hard = hard.size() == 1 && hard.front() == "all";
        for (const auto& g : groups) {
            Table t({"check_name", "n", "p", "q", "r", "beta", "h", "value", "bound", "margin", "passed"});
            SummaryRow s;
            s.check = g;
            s.hard = all_hard || std::find(hard.begin(), hard.end(), g) != hard.end();
            for (const auto* r : by_group[g]) {
                t.add({r->check_name, fmt(r->n), fmt(r->p), fmt(r->q), fmt(r->r), fmt(r->beta), fmt(r->h),
                       fmt(r->value), fmt(r->bound), fmt(r->margin), r->passed ? "1" : "0"});
                ++s.rows;
                if (!r->passed) ++s.failed;
            }
            const std::string file = "check_" + g + ".csv";
            t.write(dir_ / file);
            res.files.push_back(file);
            if (s.hard && !s.passed()) res.exit_status = 1;
            res.summary.push_back(s);
        }
        Table summary({"experiment", "check", "rows", "failed", "passed", "hard"});
        for (const auto& s : res.summary)
            summary.add({experiment, s.check, fmt(s.rows), fmt(s.failed), s.passed() ? "1" : "0", s.hard ? "1" : "0"});
        summary.write(dir_ / "summary.csv");
        res.files.push_back("summary.csv");
        return res;
    }

private:
    std::filesystem::path dir_;
    std::vector<CheckRow> rows_;
    std::vector<std::pair<std::string, Table>> tables_;
};

// ---------------------------------------------------------------- config pieces

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError("config: " + what);
}

Integrability parse_q(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "∞") return Integrability::infinity();
    Config c;
    c.set("exp.q", text);
    return Integrability::finite(c.get_double("exp.q"));
}

std::vector<Integrability> get_qs(const Config& cfg, const std::string& key, std::optional<std::string> fallback) {
    std::vector<Integrability> out;
    for (const auto& s : split_list(cfg.get_string(key, fallback))) out.push_back(parse_q(s));
    require(!out.empty(), key + " is empty");
    return out;
}

struct GridSpec {
    int n = 2;
    double L = 3.0;
    std::vector<double> hs;
    std::size_t node_cap = default_node_cap;

    BoundaryGrid grid(double h) const { return BoundaryGrid(n - 1, L, h, node_cap); }
};

GridSpec read_grid(const Config& cfg, int n_default, double L_default, std::vector<double> h_default) {
    GridSpec g;
    g.n = static_cast<int>(cfg.get_int("grid.n", n_default));
    g.L = cfg.get_double("grid.L", L_default);
    g.hs = cfg.get_doubles("grid.h", h_default);
    g.node_cap = static_cast<std::size_t>(cfg.get_int("grid.node_cap", static_cast<long long>(g.node_cap)));
    require(g.n == 2 || g.n == 3, "grid.n must be 2 or 3");
    require(g.L > 0.0 && std::isfinite(g.L), "grid.L must be positive");
    for (double h : g.hs) require(h > 0.0 && h <= g.L, "grid.h must lie in (0, grid.L]");
    // node count validated here so that no computation starts on an oversized grid
    for (double h : g.hs) (void)g.grid(h);
    return g;
}

struct LevelSpec {
    std::string schedule = "geometric";
    double h_min_factor = 1.0;
    double ratio = 1.25;
    double max = 1.0;
    double step_factor = 1.0;
    int count = 0;
    bool zero = false;

    std::vector<double> make(double h) const {
        if (schedule == "uniform") return uniform_levels(step_factor * h, count, zero);
        return geometric_levels(h_min_factor * h, ratio, max, zero);
    }
};

LevelSpec read_levels(const Config& cfg, const LevelSpec& defaults) {
    LevelSpec s;
    s.schedule = cfg.get_string("levels.schedule", defaults.schedule);
    s.h_min_factor = cfg.get_double("levels.h_min_factor", defaults.h_min_factor);
    s.ratio = cfg.get_double("levels.ratio", defaults.ratio);
    s.max = cfg.get_double("levels.max", defaults.max);
    s.step_factor = cfg.get_double("levels.step_factor", defaults.step_factor);
    s.count = static_cast<int>(cfg.get_int("levels.count", defaults.count));
    s.zero = cfg.get_bool("levels.zero", defaults.zero);
    require(s.schedule == "geometric" || s.schedule == "uniform", "levels.schedule must be geometric or uniform");
    if (s.schedule == "geometric") {
        require(s.h_min_factor > 0.0 && s.ratio > 1.0 && s.max > 0.0, "geometric levels need h_min_factor > 0, ratio > 1, max > 0");
    } else {
        require(s.step_factor > 0.0 && s.count > 0, "uniform levels need step_factor > 0 and count > 0");
    }
    return s;
}

// Boundary data: a named profile, the seeded corpus, or a CSV file whose grid
// replaces the configured one.
struct DataSpec {
    std::string kind = "gaussian";
    std::vector<TestFunction> functions;
    std::optional<BoundaryGridFunction> file;

    std::string name(std::size_t i) const { return file ? "file" : functions[i].name; }
    std::size_t count() const { return file ? 1 : functions.size(); }
    BoundaryGridFunction sample(std::size_t i, const BoundaryGrid& g) const {
        if (file) return *file;
        return functions[i].sample(g);
    }
};

DataSpec read_data(const Config& cfg, std::uint64_t seed, const std::string& kind_default, double width_default) {
    DataSpec d;
    d.kind = cfg.get_string("data.kind", kind_default);
    DataParams params;
    params.width = cfg.get_double("data.width", width_default);
    params.alpha = cfg.get_double("data.alpha", params.alpha);
    if (d.kind == "corpus") {
        d.functions = test_corpus(seed);
    } else if (d.kind == "file") {
        d.file = load_boundary_data(cfg.get_string("data.file"));
    } else {
        d.functions.push_back(named_data(d.kind, params));
    }
    return d;
}

// With file data the grid is the file's; configured spacings must not disagree.
GridSpec grid_for(const DataSpec& data, GridSpec g) {
    if (!data.file) return g;
    const auto& fg = data.file->grid;
    g.n = fg.ambient_dim();
    g.L = fg.extent();
    g.hs = {fg.spacing()};
    return g;
}

std::vector<std::string> read_hard(const Config& cfg) {
    auto hard = cfg.get_strings("checks.hard", std::vector<std::string>{"all"});
    if (hard.size() == 1 && hard.front() == "none") hard.clear();
    return hard;
}

void reject_unused(const Config& cfg) {
    const auto unused = cfg.unused_keys();
    if (unused.empty()) return;
    std::string msg = "config: unknown key";
    for (const auto& k : unused) msg += " '" + k + "'";
    throw DomainError(msg);
}

double ratio_spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
}

// ---------------------------------------------------------------- exponents

struct ExponentTriple {
    int n;
    double p;
    Integrability q;
};

RunResult run_exponents(const Config& cfg, std::uint64_t seed, Output& out) {
    std::vector<ExponentTriple> triples;
    const auto ns = cfg.get_doubles("exp.n", std::vector<double>{3});
    const auto ps = cfg.get_doubles("exp.p", std::vector<double>{1.5, 2.0, 3.0});
    const bool by_factor = cfg.has("exp.q_factor");
    const auto factors = cfg.get_doubles("exp.q_factor", std::vector<double>{2.0});
    const auto qs = by_factor ? std::vector<Integrability>{} : get_qs(cfg, "exp.q", std::nullopt);
    const int random = static_cast<int>(cfg.get_int("exp.random", 0));
    const double tol = cfg.get_double("tol.identity", 1e-12);
    const auto hard = read_hard(cfg);
    reject_unused(cfg);
    require(random >= 0, "exp.random must be >= 0");

    for (double nd : ns) {
        const int n = static_cast<int>(nd);
        require(nd == n && n >= 2, "exp.n must be integers >= 2");
        for (double p : ps) {
            require(p > 1.0 && p < n, "exp.p must lie in (1, n)");
            if (by_factor) {
                for (double f : factors) {
                    require(f > 1.0, "exp.q_factor must exceed 1");
                    triples.push_back({n, p, Integrability::finite(f * sobolev_conjugate(p, n))});
                }
            } else {
                for (const auto& q : qs) {
                    require(q.as_double() > sobolev_conjugate(p, n), "exp.q must exceed p*");
                    triples.push_back({n, p, q});
                }
            }
        }
    }
    std::mt19937_64 rng(seed);
    for (int i = 0; i < random; ++i) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const double u1 = std::generate_canonical<double, 53>(rng);
        const double u2 = std::generate_canonical<double, 53>(rng);
        const double p = 1.05 + u1 * (n - 1.1);
        triples.push_back({n, p, Integrability::finite(sobolev_conjugate(p, n) * (1.05 + 3.0 * u2))});
    }

    Table t({"n", "p", "q", "p_star", "p_bar", "r", "beta", "r_tilde", "p_max", "max_residual"});
    for (const auto& tr : triples) {
        const auto e = ExponentSet::make(tr.n, tr.p, tr.q);
        if (e.q_is_infinite()) {
            t.add({fmt(tr.n), fmt(tr.p), "inf", fmt(e.p_star()), fmt(e.p_bar()), "inf", "inf", "inf", "inf", "0"});
            continue;
        }
        const auto res = identity_residuals(e);
        const auto ie = interpolation_exponents(tr.n, tr.p, e.q_finite());
        t.add({fmt(tr.n), fmt(tr.p), fmt(e.q_finite()), fmt(e.p_star()), fmt(e.p_bar()), fmt(e.r()), fmt(e.beta()),
               fmt(ie.r_tilde), fmt(ie.p_max), fmt(res.max())});
        out.check(with_exponents(make_row("identities", tr.n, res.max(), tol, res.max() <= tol), tr.p, e.q_finite(), nan_value));
        out.check(with_exponents(make_row("r_tilde_exceeds_r", tr.n, e.r(), ie.r_tilde, ie.r_tilde > e.r()), tr.p,
                                 e.q_finite(), nan_value));
    }
    out.table("exponents.csv", std::move(t));
    return out.finish("exponents", hard);
}

// ---------------------------------------------------------------- poisson

RunResult run_poisson(const Config& cfg, std::uint64_t seed, Output& out) {
    auto data = read_data(cfg, seed, "corpus", 0.3);
    const auto grid = grid_for(data, read_grid(cfg, 2, 3.0, {0.05}));
    LevelSpec ldef;
    ldef.h_min_factor = 0.25;
    ldef.ratio = 1.5;
    ldef.max = 2.0;
    const auto levels = read_levels(cfg, ldef);
    const int refine = static_cast<int>(cfg.get_int("ladder.refine", 4));
    const double tol = cfg.get_double("tol.domination", 1e-2);
    const double mass_tol = cfg.get_double("tol.kernel_mass", 1e-3);
    const auto hard = read_hard(cfg);
    reject_unused(cfg);
    require(refine >= 2, "ladder.refine must be >= 2");

    Table t({"function", "n", "h", "gap_standard", "gap_refined", "sup_v", "sup_f", "vertical_r2", "vertical_r3",
             "maximal_r2", "maximal_r3"});
    Table mass({"n", "h", "x_n", "lattice_mass", "window_mass"});
    for (double h : grid.hs) {
        const auto g = grid.grid(h);
        const auto lv = levels.make(h);
        double worst = 0.0;
        for (double x : lv) {
            if (x <= 0.0) continue;
            const double lm = poisson_lattice_mass(g, x);
            const double wm = poisson_window_mass(g.dim(), 2.0 * g.extent() + 0.5 * h, x);
            mass.add({fmt(grid.n), fmt(h), fmt(x), fmt(lm), fmt(wm)});
            if (x >= 2.0 * h) worst = std::max(worst, std::fabs(lm - wm));
        }
        out.check(with_exponents(make_row("kernel_mass", grid.n, worst, mass_tol, worst <= mass_tol), nan_value, nan_value, h));
        for (std::size_t i = 0; i < data.count(); ++i) {
            const auto f = data.sample(i, g);
            const auto v = poisson_extend(f, lv);
            const auto Mf = maximal_function(f);
            const auto standard = check_maximal_domination(v, Mf);
            const auto refined = check_maximal_domination(v, f, RadiusLadder::refined(g, refine));
            double sup_v = 0.0, sup_f = 0.0;
            for (double x : v.values()) sup_v = std::max(sup_v, std::fabs(x));
            for (double x : f.values) sup_f = std::max(sup_f, std::fabs(x));
            const auto vm = vertical_maximal(v);
            const double f2 = lp_norm(f, 2.0), f3 = lp_norm(f, 3.0);
            const auto safe = [](double a, double b) { return b > 0.0 ? a / b : 0.0; };
            t.add({data.name(i), fmt(grid.n), fmt(h), fmt(standard.max_violation), fmt(refined.max_violation), fmt(sup_v),
                   fmt(sup_f), fmt(safe(lp_norm(vm, 2.0), f2)), fmt(safe(lp_norm(vm, 3.0), f3)),
                   fmt(safe(lp_norm(Mf, 2.0), f2)), fmt(safe(lp_norm(Mf, 3.0), f3))});
            out.check(with_exponents(make_row("maximal_domination", grid.n, standard.max_violation, tol,
                                              standard.max_violation <= tol), nan_value, nan_value, h));
            out.check(with_exponents(make_row("domination_refined", grid.n, refined.max_violation, standard.max_violation,
                                              refined.max_violation <= standard.max_violation), nan_value, nan_value, h));
            out.check(with_exponents(make_row("sup_bound", grid.n, sup_v, sup_f, sup_v <= sup_f), nan_value, nan_value, h));
        }
    }
    out.table("domination.csv", std::move(t));
    out.table("kernel_mass.csv", std::move(mass));
    return out.finish("poisson", hard);
}

// ---------------------------------------------------------------- truncation

struct TruncationCase {
    double h;
    ChiefBoundReport chief;
    TraceRecoveryReport recovery;
    MultiplicativeReport mult;
};

// Checks of one extension; returns the quantities compared across refinements.
TruncationCase truncation_case(const BoundaryGridFunction& f, const ExponentSet& e, const std::vector<double>& lv,
                               std::size_t seminorm_cap, Output& out) {
    const double h = f.grid.spacing();
    const auto ext = nonlinear_extend(f, e, lv);
    auto tag = [&](CheckRow row) {
        row = with_exponents(std::move(row), e.p(), e.q_finite(), h);
        row.n = e.n();
        return row;
    };
    out.check(tag(support_check(ext)));
    const auto Mf = maximal_function(f);
    out.check(tag(pointwise_bound_check(ext, Mf).row));
    out.check(tag(step1_bound_check(ext, Mf)));
    TruncationCase c{h, chief_bound_check(ext, seminorm_cap), trace_recovery_check(ext),
                     multiplicative_trace_inequality(ext.u, e.p(), e.q_finite())};
    out.check(tag(make_row("multiplicative", e.n(), c.mult.lhs, c.mult.rhs, c.mult.holds)));
    out.check(tag(make_row("chief_ratio_finite", e.n(), c.chief.ratio, nan_value,
                           c.chief.trivial || std::isfinite(c.chief.ratio))));
    return c;
}

RunResult run_truncation(const Config& cfg, std::uint64_t seed, Output& out) {
    const auto mode = cfg.get_string("truncation.mode", "refinement");
    require(mode == "refinement" || mode == "continuity", "truncation.mode must be refinement or continuity");
    auto data = read_data(cfg, seed, mode == "continuity" ? "indicator" : "gaussian", mode == "continuity" ? 0.5 : 0.3);
    const auto grid = grid_for(data, read_grid(cfg, 3, 1.5, {0.1, 0.05}));
    const double p = cfg.get_double("exp.p", 2.0);
    const auto q = parse_q(cfg.get_string("exp.q", "8"));
    require(!q.is_infinite(), "truncation needs finite exp.q");
    const auto e = ExponentSet::make(grid.n, p, q);
    const double ratio = cfg.get_double("levels.ratio", 1.25);
    const double level_max = cfg.get_double("levels.max", grid.L);
    const double h_min_factor = cfg.get_double("levels.h_min_factor", 1.0);
    const auto cap = static_cast<std::size_t>(cfg.get_int("seminorm.node_cap", static_cast<long long>(default_seminorm_node_cap)));
    const double rec_lo = cfg.get_double("tol.recovery_min", 1.5);
    const double rec_hi = cfg.get_double("tol.recovery_max", 3.0);
    const double chief_tol = cfg.get_double("tol.chief_stability", 0.2);
    const double degrade = cfg.get_double("tol.margin_degradation", 0.5);
    std::vector<double> deltas;
    if (mode == "continuity") deltas = cfg.get_doubles("continuity.deltas", std::vector<double>{0.32, 0.16, 0.08, 0.04});
    const auto hard = read_hard(cfg);
    reject_unused(cfg);
    require(ratio > 1.0 && level_max > 0.0 && h_min_factor > 0.0, "levels need ratio > 1, max > 0, h_min_factor > 0");
    for (std::size_t i = 1; i < grid.hs.size(); ++i) require(grid.hs[i] < grid.hs[i - 1], "grid.h must decrease");

    if (mode == "continuity") {
        require(deltas.size() >= 3, "continuity.deltas needs at least three widths");
        for (std::size_t i = 1; i < deltas.size(); ++i) require(deltas[i] < deltas[i - 1] && deltas[i] > 0.0, "continuity.deltas must decrease");
        require(grid.hs.size() == 1, "continuity mode takes one grid.h");
        require(data.count() == 1, "continuity mode takes one data function");
        const auto g = grid.grid(grid.hs.front());
        const auto f = data.sample(0, g);
        const auto lv = truncation_levels(h_min_factor * g.spacing(), ratio, level_max);
        std::vector<HalfSpaceField> us;
        for (double d : deltas) us.push_back(nonlinear_extend(mollify(f, d), e, lv).u);
        Table t({"k", "delta", "next_delta", "distance"});
        double prev = nan_value;
        for (std::size_t k = 0; k + 1 < us.size(); ++k) {
            const double d = lifting_distance(us[k], us[k + 1], e.p(), e.q_finite());
            t.add({fmt(k), fmt(deltas[k]), fmt(deltas[k + 1]), fmt(d)});
            if (k > 0) {
                auto row = with_exponents(make_row("cauchy_monotone", grid.n, d, prev, d < prev), e.p(), e.q_finite(), g.spacing());
                out.check(row);
            }
            prev = d;
        }
        out.table("continuity.csv", std::move(t));
        return out.finish("truncation", hard);
    }

    Table t({"function", "h", "lhs", "rhs", "chief_ratio", "trace_l1_error", "mult_lhs", "mult_rhs", "mult_margin"});
    for (std::size_t i = 0; i < data.count(); ++i) {
        std::vector<TruncationCase> cases;
        for (double h : grid.hs) {
            const auto g = grid.grid(h);
            cases.push_back(truncation_case(data.sample(i, g), e, truncation_levels(h_min_factor * h, ratio, level_max), cap, out));
            const auto& c = cases.back();
            t.add({data.name(i), fmt(h), fmt(c.chief.lhs), fmt(c.chief.rhs), fmt(c.chief.ratio), fmt(c.recovery.l1_error),
                   fmt(c.mult.lhs), fmt(c.mult.rhs), fmt(c.mult.margin)});
        }
        for (std::size_t k = 1; k < cases.size(); ++k) {
            const auto& a = cases[k - 1];
            const auto& b = cases[k];
            auto tag = [&](CheckRow row) { return with_exponents(std::move(row), e.p(), e.q_finite(), b.h); };
            if (b.recovery.l1_error > 0.0) {
                const double factor = a.recovery.l1_error / b.recovery.l1_error;
                out.check(tag(make_row("trace_recovery_factor", grid.n, factor, rec_hi, factor >= rec_lo && factor <= rec_hi)));
            }
            if (!cases.front().chief.trivial) {
                const double drift = std::fabs(b.chief.ratio / cases.front().chief.ratio - 1.0);
                out.check(tag(make_row("chief_stability", grid.n, drift, chief_tol, drift <= chief_tol)));
            }
            const double floor = (1.0 - degrade) * a.mult.margin;
            out.check(tag(make_row("margin_degradation", grid.n, -b.mult.margin, -floor, b.mult.margin > floor)));
        }
    }
    out.table("chief.csv", std::move(t));
    return out.finish("truncation", hard);
}

// ---------------------------------------------------------------- staircase

RunResult run_staircase(const Config& cfg, std::uint64_t seed, Output& out) {
    auto data = read_data(cfg, seed, "indicator", 1.0);
    const auto grid = grid_for(data, read_grid(cfg, 3, 4.0, {0.04}));
    const auto qs = get_qs(cfg, "exp.q", "2, inf");
    const int J = static_cast<int>(cfg.get_int("staircase.J", 6));
    const int samples = static_cast<int>(cfg.get_int("staircase.samples_per_strip", 3));
    ApproximantOptions opts;
    opts.initial_width = cfg.get_double("staircase.initial_width", 0.0);
    opts.initial_radius = cfg.get_double("staircase.initial_radius", 0.0);
    opts.max_halvings = static_cast<int>(cfg.get_int("staircase.max_halvings", opts.max_halvings));
    const auto hard = read_hard(cfg);
    reject_unused(cfg);
    require(J >= 1 && J <= opts.max_layers, "staircase.J out of range");
    require(samples >= 0, "staircase.samples_per_strip must be >= 0");
    for (const auto& q : qs)
        require(q.is_infinite() || q.value() > grid.n / (grid.n - 1.0), "exp.q must exceed n/(n-1)");

    for (double h : grid.hs) {
        const auto g = grid.grid(h);
        for (std::size_t i = 0; i < data.count(); ++i) {
            const auto f = data.sample(i, g);
            for (const auto& q : qs) {
                const auto field = staircase_extend(f, q, J, opts, samples);
                const auto bounds = staircase_bounds_check(field);
                out.checks(bounds.rows(field));
                const auto& sch = field.schedule;
                Table t({"j", "e_j", "gamma_j", "s_j", "t_j"});
                for (int j = 0; j <= J; ++j)
                    t.add({fmt(j), fmt(field.sequence.errors[static_cast<std::size_t>(j)]), fmt(sch.gammas[static_cast<std::size_t>(j)]),
                           fmt(sch.widths[static_cast<std::size_t>(j)]), fmt(sch.heights[static_cast<std::size_t>(j)])});
                bool decreasing = true;
                for (int j = 0; j < J; ++j) decreasing = decreasing && sch.heights[j + 1] < sch.heights[j];
                auto row = make_row("schedule_decreasing", grid.n, sch.heights.back() / sch.heights.front(), 1.0, decreasing);
                row.p = 1.0;
                row.q = q.as_double();
                row.h = h;
                out.check(row);
                std::string file = "schedule";
                if (data.count() > 1) file += "_" + data.name(i);
                if (qs.size() > 1) file += q.is_infinite() ? "_qinf" : "_q" + fmt(q.value());
                if (grid.hs.size() > 1) file += "_h" + fmt(h);
                out.table(file + ".csv", std::move(t));
            }
        }
    }
    return out.finish("staircase", hard);
}

// ---------------------------------------------------------------- celliptic

FieldComponents celliptic_field(const DiffOperator& op, const BoundaryGrid& g, const std::vector<double>& lv, double width) {
    FieldComponents u;
    for (int c = 0; c < op.N; ++c)
        u.push_back(sample_half_space(
            [c, width](std::span<const double> x, double t) {
                double r2 = t * t;
                for (double v : x) r2 += v * v;
                const double w = c == 0 ? 1.0 : 0.3 + 0.5 * x[0];
                return w * std::exp(-r2 / (2.0 * width * width));
            },
            g, lv));
    return u;
}

// max |Π π - π| over grid nodes of a cube and |Π Π u - Π u| in coefficients.
std::pair<double, double> projection_errors(const PolyKernelBasis& basis, const BoundaryGrid& g,
                                            const std::vector<double>& lv, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    std::vector<double> coeffs(basis.size());
    for (auto& c : coeffs) c = gauss(rng);
    const auto quad = cube_quadrature(g, lv, basis.cube, basis.degree);
    const auto poly = sample_polynomial(basis, coeffs, g, lv);
    const auto back = project_coefficients(poly, basis, quad);
    double reproduction = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) reproduction = std::max(reproduction, std::fabs(back[i] - coeffs[i]));
    // idempotence on a non-polynomial field
    FieldComponents u;
    for (int c = 0; c < basis.op.N; ++c)
        u.push_back(sample_half_space(
            [c](std::span<const double> x, double t) { return std::sin(3.0 * x[0] + c) * std::cos(2.0 * t) + t * t * x[0]; }, g, lv));
    const auto first = project_coefficients(u, basis, quad);
    const auto again = project_coefficients(sample_polynomial(basis, first, g, lv), basis, quad);
    double idem = 0.0;
    for (std::size_t i = 0; i < first.size(); ++i) idem = std::max(idem, std::fabs(again[i] - first[i]));
    return {reproduction, idem};
}

RunResult run_celliptic(const Config& cfg, std::uint64_t seed, Output& out) {
    const auto names = cfg.get_strings("celliptic.operators", std::vector<std::string>{"gradient", "symmetric_gradient", "cauchy_riemann"});
    const auto grid = read_grid(cfg, 2, 2.0, {std::ldexp(1.0, -8)});
    const int j_min = static_cast<int>(cfg.get_int("celliptic.j_min", 2));
    const int j_max = static_cast<int>(cfg.get_int("celliptic.j_max", 6));
    const int degree_cap = static_cast<int>(cfg.get_int("celliptic.degree_cap", 4));
    const auto samples = static_cast<std::size_t>(cfg.get_int("celliptic.samples", 10000));
    const int octaves = static_cast<int>(cfg.get_int("celliptic.octaves", 4));
    const double height = cfg.get_double("levels.max", 1.8);
    const double width = cfg.get_double("data.width", 0.4);
    const double proj_tol = cfg.get_double("tol.projection", 1e-10);
    const double trace_tol = cfg.get_double("tol.trace_error", 1e-2);
    const double linf_tol = cfg.get_double("tol.linf_spread", 1.5);
    const double drift_tol = cfg.get_double("tol.constant_drift", 0.1);
    const auto hard = read_hard(cfg);
    reject_unused(cfg);
    require(grid.n == 2 || grid.n == 3, "grid.n must be 2 or 3");
    require(grid.hs.size() == 1, "celliptic takes one grid.h");
    require(j_min >= 0 && j_max >= j_min, "need 0 <= celliptic.j_min <= celliptic.j_max");
    require(degree_cap >= 1 && samples > 0 && octaves >= 2, "celliptic.degree_cap, samples, octaves out of range");
    require(height > std::ldexp(1.75, -j_min), "levels.max must reach the shifted cubes of level j_min");
    std::vector<DiffOperator> ops;
    for (const auto& name : names) ops.push_back(DiffOperator::by_name(name, grid.n));

    const double h = grid.hs.front();
    const auto g = grid.grid(h);
    const auto lv = uniform_levels(h, static_cast<int>(std::ceil(height / h)), true);
    std::mt19937_64 rng(seed);

    // cover, partition of unity and localizer at the finest level
    {
        std::array<double, 3> lo{}, hi{};
        for (int k = 0; k < grid.n - 1; ++k) {
            lo[k] = -1.0;
            hi[k] = 1.0;
        }
        hi[grid.n - 1] = 1.0;
        const auto cover = build_cover(j_min, grid.n, lo, hi);
        const auto cr = check_cover(cover, 4096, seed);
        out.check(make_row("cover", grid.n, cr.max_overlap, std::pow(2.0, grid.n), cr.covers && cr.max_overlap <= (1 << grid.n)));
        out.check(make_row("cover_intersection", grid.n, cr.intersection_constant, nan_value, std::isfinite(cr.intersection_constant)));
        const PartitionOfUnity pou(cover);
        const auto pr = check_partition(pou, 4096, seed + 1);
        out.check(make_row("partition_sum", grid.n, pr.max_sum_error, 1e-12, pr.max_sum_error <= 1e-12));
        out.check(make_row("partition_gradient", grid.n, pr.scaled_gradient, 3.75, pr.scaled_gradient <= 3.75 * (1.0 + 1e-12)));
        const auto lr = check_localizer(j_min);
        out.check(make_row("localizer", grid.n, lr.scaled_gradient, 3.75, lr.sandwich && lr.scaled_gradient <= 3.75 * (1.0 + 1e-12)));
    }

    Table dims({"operator", "degree", "kernel_dimension"});
    for (const auto& op : ops) {
        const auto verdict = is_c_elliptic(op, samples, seed);
        const auto kd = kernel_dimensions(op, degree_cap);
        for (std::size_t d = 0; d < kd.size(); ++d) dims.add({op.name, fmt(d), fmt(kd[d])});
        bool stabilized = false;
        for (std::size_t d = 1; d < kd.size(); ++d) stabilized = stabilized || kd[d] == kd[d - 1];
        auto row = make_row("ellipticity_" + op.name, op.n, verdict.min_singular, ellipticity_threshold,
                            verdict.likely_elliptic == stabilized);
        out.check(row);
        if (!stabilized) {
            // the negative control: projection and trace are undefined
            bool raised = false;
            try {
                (void)kernel_basis(op, Cube{op.n, {}, 2.0}, degree_cap);
            } catch (const ConvergenceError&) {
                raised = true;
            }
            out.check(make_row("stabilization_failure_" + op.name, op.n, kd.back(), nan_value, raised));
            continue;
        }

        const double side0 = 0.5;
        Cube q0{op.n, {}, side0};
        q0.center[op.n - 1] = 1.75 * side0;
        const auto basis = kernel_basis(op, q0, degree_cap);
        out.check(make_row("kernel_dimension_" + op.name, op.n, static_cast<double>(basis.size()), nan_value,
                           basis.operator_residual() <= 1e-12));
        const auto [repro, idem] = projection_errors(basis, g, lv, rng);
        out.check(make_row("projection_reproduction", op.n, repro, proj_tol, repro <= proj_tol));
        out.check(make_row("projection_idempotence", op.n, idem, proj_tol, idem <= proj_tol));

        std::vector<double> ne, ie;
        for (int k = 0; k < octaves; ++k) {
            const double side = std::ldexp(side0, -k);
            Cube q{op.n, {}, side};
            q.center[0] = 0.1;
            q.center[op.n - 1] = 1.75 * side;
            const auto b = basis.on_cube(q);
            ne.push_back(norm_equivalence_constant(b, q, 64, seed + 2));
            ie.push_back(inverse_estimate_constant(b, g, lv, 16, seed + 3));
        }
        const double ne_drift = ratio_spread(ne) - 1.0, ie_drift = ratio_spread(ie) - 1.0;
        out.check(make_row("norm_equivalence_drift", op.n, ne_drift, drift_tol, ne_drift <= drift_tol));
        out.check(make_row("inverse_estimate_drift", op.n, ie_drift, drift_tol, ie_drift <= drift_tol));
        Table consts({"octave", "side", "norm_equivalence", "inverse_estimate"});
        for (int k = 0; k < octaves; ++k)
            consts.add({fmt(k), fmt(std::ldexp(side0, -k)), fmt(ne[static_cast<std::size_t>(k)]), fmt(ie[static_cast<std::size_t>(k)])});
        out.table("constants_" + op.name + ".csv", std::move(consts));

        const auto u = celliptic_field(op, g, lv, width);
        ReplacementOptions ro;
        ro.j_min = j_min;
        ro.degree_cap = degree_cap;
        const auto run = replacement_trace(u, op, j_max, ro);
        Table t({"j", "cube_count", "l1_increment", "l1_trace_norm", "linf_ratio"});
        std::vector<double> linf;
        for (const auto& it : run.iterates) {
            t.add({fmt(it.j), fmt(it.cube_count), fmt(it.l1_increment), fmt(it.l1_trace_norm), fmt(it.linf_ratio)});
            linf.push_back(it.linf_ratio);
        }
        out.table("trace_" + op.name + ".csv", std::move(t));
        const double rel = run.last().l1_error / run.boundary_l1;
        auto er = make_row("replacement_trace_error", op.n, rel, trace_tol, rel < trace_tol);
        er.h = h;
        out.check(er);
        const double spread = ratio_spread(linf);
        out.check(make_row("linf_stability", op.n, spread, linf_tol, std::isfinite(spread) && spread <= linf_tol));
        const auto tb = trace_bounds_check(run, u);
        out.check(make_row("trace_l1_constant", op.n, tb.l1_constant, nan_value, std::isfinite(tb.l1_constant)));
    }
    out.table("kernel_dimensions.csv", std::move(dims));
    return out.finish("celliptic", hard);
}

// ---------------------------------------------------------------- divergence

RunResult run_divergence(const Config& cfg, std::uint64_t, Output& out) {
    const int n = static_cast<int>(cfg.get_int("grid.n", 2));
    const double p = cfg.get_double("exp.p", 2.0);
    const double alpha = cfg.get_double("exp.alpha", 0.9);
    const auto heights = cfg.get_doubles("divergence.heights", std::vector<double>{4, 8, 16, 32});
    DivergenceSetup setup;
    setup.L = cfg.get_double("grid.L", setup.L);
    setup.h = cfg.get_double("grid.h", setup.h);
    setup.level_min = cfg.get_double("levels.h_min", setup.level_min);
    setup.levels_per_octave = static_cast<int>(cfg.get_int("levels.per_octave", setup.levels_per_octave));
    const double growth_tol = cfg.get_double("tol.growth_ratio", 2.0);
    const double plateau_tol = cfg.get_double("tol.plateau_ratio", 1.2);
    const bool control = cfg.get_bool("divergence.control", true);
    const auto hard = read_hard(cfg);
    reject_unused(cfg);
    require(n == 2 || n == 3, "grid.n must be 2 or 3");
    require(p >= 1.0 && std::isfinite(p), "exp.p must be finite and >= 1");
    require(alpha > (n - 1.0) / p && alpha <= n / p, "exp.alpha must lie in ((n-1)/p, n/p]");
    require(setup.h > 0.0 && setup.L > 0.0 && setup.level_min > 0.0 && setup.levels_per_octave > 0, "divergence grid out of range");
    for (std::size_t i = 0; i < heights.size(); ++i)
        require(heights[i] > 0.0 && (i == 0 || heights[i] > heights[i - 1]), "divergence.heights must increase");
    (void)BoundaryGrid(n - 1, setup.L, setup.h);

    auto emit = [&](const GrowthTable& gt, const std::string& file) {
        Table t({"H", "strip_norm", "fitted_exponent"});
        for (const auto& r : gt.rows) t.add({fmt(r.H), fmt(r.strip_norm), fmt(r.fitted_exponent)});
        out.table(file, std::move(t));
    };
    const auto growth = divergence_experiment(alpha, p, n, heights, setup);
    emit(growth, "growth.csv");
    auto tag = [&](CheckRow row) {
        row.p = p;
        row.h = setup.h;
        return row;
    };
    out.check(tag(make_row("growth_strictly_increasing", n, growth.fitted_exponent, nan_value, growth.strictly_increasing())));
    out.check(tag(make_row("growth_ratio", n, growth.last_over_first(), growth_tol, growth.last_over_first() >= growth_tol)));
    if (control) {
        setup.data = DivergenceData::compact_control;
        const auto plateau = divergence_experiment(alpha, p, n, heights, setup);
        emit(plateau, "growth_control.csv");
        out.check(tag(make_row("control_plateau", n, plateau.last_over_first(), plateau_tol, plateau.last_over_first() <= plateau_tol)));
    }
    return out.finish("divergence", hard);
}

// ---------------------------------------------------------------- sweep

RunResult run_sweep(const Config& cfg, std::uint64_t seed, Output& out) {
    const auto ns = cfg.get_doubles("sweep.n", std::vector<double>{2, 3});
    const auto ps = cfg.get_doubles("sweep.p", std::vector<double>{1.5, 2.0});
    const auto qs = cfg.get_doubles("sweep.q", std::vector<double>{8, 12});
    const auto hs = cfg.get_doubles("sweep.h", std::vector<double>{0.1, 0.05});
    const double L = cfg.get_double("grid.L", 1.5);
    const double ratio = cfg.get_double("levels.ratio", 1.25);
    auto data = read_data(cfg, seed, "gaussian", 0.3);
    const auto hard = read_hard(cfg);
    reject_unused(cfg);
    require(!data.file, "sweep needs a sampled data kind");
    require(L > 0.0 && ratio > 1.0, "grid.L and levels.ratio out of range");

    struct Item {
        int n;
        double p, q, h;
    };
    std::vector<Item> items;
    for (double nd : ns)
        for (double p : ps)
            for (double q : qs)
                for (double h : hs) {
                    const int n = static_cast<int>(nd);
                    require(nd == n && (n == 2 || n == 3), "sweep.n must be 2 or 3");
                    require(h > 0.0 && h <= L, "sweep.h out of range");
                    (void)ExponentSet::make(n, p, q);
                    (void)BoundaryGrid(n - 1, L, h);
                    items.push_back({n, p, q, h});
                }

    Table t({"function", "n", "p", "q", "h", "r", "beta", "chief_ratio", "trace_l1_error", "mult_margin"});
    for (const auto& it : items) {
        const auto e = ExponentSet::make(it.n, it.p, it.q);
        const BoundaryGrid g(it.n - 1, L, it.h);
        for (std::size_t i = 0; i < data.count(); ++i) {
            const auto c = truncation_case(data.sample(i, g), e, truncation_levels(it.h, ratio, L), default_seminorm_node_cap, out);
            t.add({data.name(i), fmt(it.n), fmt(it.p), fmt(it.q), fmt(it.h), fmt(e.r()), fmt(e.beta()), fmt(c.chief.ratio),
                   fmt(c.recovery.l1_error), fmt(c.mult.margin)});
        }
    }
    out.table("sweep.csv", std::move(t));
    return out.finish("sweep", hard);
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"exponents", "poisson", "truncation", "staircase",
                                                "celliptic", "divergence", "sweep"};
    return names;
}

std::string check_group(const std::string& name) {
    const auto pos = name.rfind("_j");
    if (pos == std::string::npos || pos + 2 == name.size()) return name;
    for (std::size_t i = pos + 2; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return name;
    return name.substr(0, pos);
}

RunResult run(const std::string& experiment, const Config& config, const RunOptions& options) {
    using Runner = std::function<RunResult(const Config&, std::uint64_t, Output&)>;
    static const std::map<std::string, Runner> runners{
        {"exponents", run_exponents}, {"poisson", run_poisson},       {"truncation", run_truncation},
        {"staircase", run_staircase}, {"celliptic", run_celliptic},   {"divergence", run_divergence},
        {"sweep", run_sweep}};
    const auto it = runners.find(experiment);
    if (it == runners.end()) throw DomainError("unknown experiment '" + experiment + "'");
    if (config.has("experiment") && config.get_string("experiment") != experiment)
        throw DomainError("config is for experiment '" + config.get_string("experiment") + "', not '" + experiment + "'");
    std::uint64_t seed = static_cast<std::uint64_t>(config.get_int("seed", static_cast<long long>(default_seed)));
    if (options.seed) seed = *options.seed;
    Output out(options.out_dir);
    return it->second(config, seed, out);
}

}  // namespace tracelab::harness
