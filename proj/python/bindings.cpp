// Python bindings over numpy arrays. Grid functions travel as flat arrays in
// the grid's node order; half-space fields as (levels, nodes) arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "tracelab/celliptic_operator.hpp"
#include "tracelab/config.hpp"
#include "tracelab/corpus.hpp"
#include "tracelab/error.hpp"
#include "tracelab/exponents.hpp"
#include "tracelab/harness.hpp"
#include "tracelab/maximal.hpp"
#include "tracelab/norms.hpp"
#include "tracelab/poisson.hpp"
#include "tracelab/staircase.hpp"
#include "tracelab/truncation.hpp"

namespace py = pybind11;
using namespace tracelab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

BoundaryGridFunction to_function(const BoundaryGrid& g, const Array& a) {
    if (static_cast<std::size_t>(a.size()) != g.node_count())
        throw DomainError("expected " + std::to_string(g.node_count()) + " values, got " + std::to_string(a.size()));
    return BoundaryGridFunction(g, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

Array to_array(const HalfSpaceField& u) {
    Array out({static_cast<py::ssize_t>(u.level_count()), static_cast<py::ssize_t>(u.grid().node_count())});
    std::copy(u.values().begin(), u.values().end(), out.mutable_data());
    return out;
}

Integrability to_q(double q) { return std::isinf(q) ? Integrability::infinity() : Integrability::finite(q); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Numerical lab for trace and lifting constructions";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.def("exponents", [](int n, double p, double q) {
        const auto e = ExponentSet::make(n, p, to_q(q));
        py::dict d;
        d["n"] = n;
        d["p"] = p;
        d["q"] = q;
        d["p_star"] = e.p_star();
        d["p_bar"] = e.p_bar();
        if (!e.q_is_infinite()) {
            d["r"] = e.r();
            d["beta"] = e.beta();
            d["max_residual"] = identity_residuals(e).max();
        }
        return d;
    }, py::arg("n"), py::arg("p"), py::arg("q"));

    py::class_<BoundaryGrid>(m, "BoundaryGrid")
        .def(py::init<int, double, double>(), py::arg("dim"), py::arg("L"), py::arg("h"))
        .def_property_readonly("dim", &BoundaryGrid::dim)
        .def_property_readonly("L", &BoundaryGrid::extent)
        .def_property_readonly("h", &BoundaryGrid::spacing)
        .def_property_readonly("node_count", &BoundaryGrid::node_count)
        .def("points", [](const BoundaryGrid& g) {
            Array out({static_cast<py::ssize_t>(g.node_count()), static_cast<py::ssize_t>(g.dim())});
            auto* d = out.mutable_data();
            for (std::size_t i = 0; i < g.node_count(); ++i) {
                const auto x = g.point(i);
                for (int k = 0; k < g.dim(); ++k) *d++ = x[k];
            }
            return out;
        })
        .def("weights", [](const BoundaryGrid& g) { return to_array(g.weights()); })
        .def("__repr__", [](const BoundaryGrid& g) {
            return "BoundaryGrid(dim=" + std::to_string(g.dim()) + ", L=" + std::to_string(g.extent()) +
                   ", h=" + std::to_string(g.spacing()) + ")";
        });

    m.def("sample", [](const std::string& kind, const BoundaryGrid& g, double width, double alpha) {
        return to_array(named_data(kind, {width, alpha}).sample(g).values);
    }, py::arg("kind"), py::arg("grid"), py::arg("width") = 0.3, py::arg("alpha") = 0.9);

    m.def("corpus", [](const BoundaryGrid& g, std::uint64_t seed) {
        py::dict d;
        for (const auto& tf : test_corpus(seed)) d[py::str(tf.name)] = to_array(tf.sample(g).values);
        return d;
    }, py::arg("grid"), py::arg("seed") = harness::default_seed);

    m.def("lp_norm", [](const BoundaryGrid& g, const Array& f, double p) { return lp_norm(to_function(g, f), p); },
          py::arg("grid"), py::arg("f"), py::arg("p"));

    m.def("gagliardo_seminorm", [](const BoundaryGrid& g, const Array& f, double s, double p, std::size_t cap) {
        return gagliardo_seminorm(to_function(g, f), {s, p}, cap);
    }, py::arg("grid"), py::arg("f"), py::arg("s"), py::arg("p"), py::arg("node_cap") = default_seminorm_node_cap);

    m.def("maximal_function", [](const BoundaryGrid& g, const Array& f, int refine) {
        const auto fn = to_function(g, f);
        return to_array(maximal_function(fn, refine > 1 ? RadiusLadder::refined(g, refine) : RadiusLadder::standard(g)).values);
    }, py::arg("grid"), py::arg("f"), py::arg("refine") = 1);

    m.def("poisson_extend", [](const BoundaryGrid& g, const Array& f, std::vector<double> levels) {
        return to_array(poisson_extend(to_function(g, f), std::move(levels)));
    }, py::arg("grid"), py::arg("f"), py::arg("levels"));

    m.def("geometric_levels", &geometric_levels, py::arg("h_min"), py::arg("ratio"), py::arg("x_max"),
          py::arg("include_zero") = false);
    m.def("truncation_levels", &truncation_levels, py::arg("h_min"), py::arg("ratio"), py::arg("x_max"));

    m.def("truncation_extend", [](const BoundaryGrid& g, const Array& f, double p, double q, std::vector<double> levels) {
        const auto ext = nonlinear_extend(to_function(g, f), ExponentSet::make(g.ambient_dim(), p, q), std::move(levels));
        const auto mult = multiplicative_trace_inequality(ext.u, p, q);
        const auto chief = chief_bound_check(ext);
        py::dict d;
        d["levels"] = ext.u.levels();
        d["v"] = to_array(ext.v);
        d["u"] = to_array(ext.u);
        d["support_ok"] = support_check(ext).passed;
        d["multiplicative_margin"] = mult.margin;
        d["chief_ratio"] = chief.ratio;
        d["trace_l1_error"] = trace_recovery_check(ext).l1_error;
        return d;
    }, py::arg("grid"), py::arg("f"), py::arg("p"), py::arg("q"), py::arg("levels"));

    m.def("staircase_bounds", [](const BoundaryGrid& g, const Array& f, double q, int J) {
        const auto field = staircase_extend(to_function(g, f), to_q(q), J);
        const auto b = staircase_bounds_check(field);
        py::dict d;
        d["heights"] = field.schedule.heights;
        d["f_l1"] = field.sequence.f_l1;
        d["trace_errors"] = b.trace_errors;
        d["normal_l1"] = b.normal_l1;
        d["lq_power"] = b.lq_power;
        d["layer_value_error"] = b.layer_value_error;
        d["sup_u"] = b.sup_u;
        d["sup_f"] = b.sup_f;
        return d;
    }, py::arg("grid"), py::arg("f"), py::arg("q"), py::arg("J") = 6);

    m.def("is_c_elliptic", [](const std::string& name, int n) {
        return is_c_elliptic(DiffOperator::by_name(name, n)).likely_elliptic;
    }, py::arg("operator"), py::arg("n") = 2);
    m.def("kernel_dimensions", [](const std::string& name, int n, int max_degree) {
        return kernel_dimensions(DiffOperator::by_name(name, n), max_degree);
    }, py::arg("operator"), py::arg("n") = 2, py::arg("max_degree") = 3);

    m.def("experiments", &harness::experiment_names);
    m.def("run_experiment", [](const std::string& experiment, const std::string& config, const std::string& out_dir,
                               std::optional<std::uint64_t> seed) {
        const auto r = harness::run(experiment, Config::load(config), {out_dir, seed});
        py::list summary;
        for (const auto& s : r.summary) {
            py::dict d;
            d["check"] = s.check;
            d["rows"] = s.rows;
            d["failed"] = s.failed;
            d["hard"] = s.hard;
            summary.append(d);
        }
        py::dict d;
        d["files"] = r.files;
        d["summary"] = summary;
        d["exit_status"] = r.exit_status;
        return d;
    }, py::arg("experiment"), py::arg("config"), py::arg("out_dir") = ".", py::arg("seed") = py::none());
}
