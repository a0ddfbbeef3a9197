// Python bindings. Reports come back as plain dicts with the same content as
// the command-line JSON.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>

#include "geoproj/acceptance.hpp"

namespace py = pybind11;
using namespace geoproj;

namespace {

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(dump_json(j)); }

ScalarField as_field(const py::object& o) {
    if (py::isinstance<ScalarField>(o)) return o.cast<ScalarField>();
    if (py::isinstance<py::str>(o)) return parse_expression(o.cast<std::string>());
    return ScalarField(o.cast<double>());
}

ChartMap as_map(const py::object& o) {
    if (py::isinstance<ChartMap>(o)) return o.cast<ChartMap>();
    const auto uv = o.cast<std::pair<py::object, py::object>>();
    return ChartMap("map", as_field(uv.first), as_field(uv.second));
}

ZooParams as_params(const py::kwargs& kw) {
    ZooParams p;
    for (const auto& [k, v] : kw) p.values[k.cast<std::string>()] = py::str(v).cast<std::string>();
    return p;
}

GeodesicState as_state(const std::array<double, 4>& s) { return {0.0, s[0], s[1], s[2], s[3]}; }

py::array_t<double> samples_array(const GeodesicTrace& tr) {
    py::array_t<double> a({static_cast<py::ssize_t>(tr.samples.size()), py::ssize_t{5}});
    auto m = a.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < static_cast<py::ssize_t>(tr.samples.size()); ++i) {
        const auto& s = tr.samples[static_cast<std::size_t>(i)];
        m(i, 0) = s.t;
        m(i, 1) = s.x;
        m(i, 2) = s.y;
        m(i, 3) = s.vx;
        m(i, 4) = s.vy;
    }
    return a;
}

}  // namespace

PYBIND11_MODULE(geoproj, mod) {
    mod.doc() = "Geodesic flows, first integrals and projective equivalence of surface metrics";

    py::register_exception<DomainError>(mod, "DomainError");
    py::register_exception<ConstructionError>(mod, "ConstructionError");
    py::register_exception<ChartFormatError>(mod, "ChartFormatError");

    py::class_<ScalarField>(mod, "ScalarField")
        .def(py::init([](const py::object& o) { return as_field(o); }), py::arg("value"))
        .def("__call__", &ScalarField::eval, py::arg("x"), py::arg("y"))
        .def("dx", &ScalarField::dx)
        .def("dy", &ScalarField::dy)
        .def("is_constant", &ScalarField::is_constant)
        .def("__str__", &ScalarField::to_string)
        .def("__repr__", [](const ScalarField& f) { return "ScalarField('" + f.to_string() + "')"; });

    py::class_<ChartMap>(mod, "ChartMap")
        .def(py::init([](const std::string& name, const py::object& u, const py::object& v) {
                 return ChartMap(name, as_field(u), as_field(v));
             }),
             py::arg("name"), py::arg("u"), py::arg("v"))
        .def_property_readonly("name", &ChartMap::name)
        .def("__call__", [](const ChartMap& m, double x, double y) {
            const Point p = m.apply({x, y});
            return std::pair{p.x, p.y};
        });

    py::class_<MetricChart>(mod, "MetricChart")
        .def(py::init([](const std::string& name, const py::object& g11, const py::object& g12, const py::object& g22,
                         const std::string& signature) {
                 if (signature != "riemannian" && signature != "lorentzian")
                     throw py::value_error("signature must be 'riemannian' or 'lorentzian'");
                 return MetricChart(name, as_field(g11), as_field(g12), as_field(g22),
                                    signature == "riemannian" ? Signature::Riemannian : Signature::Lorentzian);
             }),
             py::arg("name"), py::arg("g11"), py::arg("g12"), py::arg("g22"), py::arg("signature"))
        .def_property_readonly("name", &MetricChart::name)
        .def_property_readonly("signature", [](const MetricChart& m) { return to_string(m.signature()); })
        .def("matrix",
             [](const MetricChart& m, double x, double y) {
                 const Sym2 g = m.matrix({x, y});
                 return std::array<double, 3>{g.xx, g.xy, g.yy};
             })
        .def("contains", [](const MetricChart& m, double x, double y) { return m.contains({x, y}); })
        .def("serialize", &serialize_chart)
        .def("__repr__", [](const MetricChart& m) { return "<MetricChart '" + m.name() + "'>"; });

    py::class_<FiberIntegral>(mod, "FiberIntegral")
        .def_property_readonly("name", &FiberIntegral::name)
        .def("__call__", [](const FiberIntegral& I, double x, double y, double vx, double vy) {
            return I({x, y}, {vx, vy});
        });

    mod.def("parse_chart", &parse_chart, py::arg("text"));
    mod.def("load_chart", &load_chart, py::arg("path"));
    mod.def("catalogue", [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& it : catalogue()) out.emplace_back(it.name, it.description);
        return out;
    });
    mod.def(
        "zoo",
        [](const std::string& name, const py::kwargs& kw) {
            const ZooEntry e = make_zoo(name, as_params(kw));
            py::dict d;
            d["chart"] = e.chart;
            d["integrals"] = e.integrals;
            d["maps"] = e.maps;
            return d;
        },
        py::arg("name"), "Catalogue entry: dict with chart, integrals (energy first) and named maps.");

    mod.def("gaussian_curvature", [](const MetricChart& m, double x, double y) { return gaussian_curvature(m, {x, y}); });
    mod.def("gaussian_curvature_limit", [](const MetricChart& m, double x, double y, double dx, double dy) {
        return gaussian_curvature_limit(m, {x, y}, {dx, dy});
    });
    mod.def("pullback", py::overload_cast<const MetricChart&, const ChartMap&>(&pullback), py::arg("chart"),
            py::arg("map"));

    mod.def(
        "integrate_geodesic",
        [](const MetricChart& m, const std::array<double, 4>& s, double t_max) {
            const GeodesicTrace tr = integrate_geodesic(m, as_state(s), t_max);
            return std::pair{samples_array(tr), std::string(to_string(tr.reason))};
        },
        py::arg("chart"), py::arg("state"), py::arg("t_max"),
        "Returns (samples, termination) with sample rows t, x, y, vx, vy.");
    mod.def(
        "find_conjugate_points",
        [](const MetricChart& m, const std::array<double, 4>& s, double t_max) {
            return find_conjugate_points(m, as_state(s), t_max);
        },
        py::arg("chart"), py::arg("state"), py::arg("t_max"));
    mod.def(
        "detect_closure",
        [](const MetricChart& m, const std::array<double, 4>& s, double t_max, double tol) {
            ClosureOptions o;
            o.tol = tol;
            const ClosureResult r = detect_closure(m, as_state(s), t_max, o);
            py::dict d;
            d["closed"] = r.closed;
            d["period"] = r.period;
            d["distance"] = r.distance;
            d["termination"] = to_string(r.trace_end);
            return d;
        },
        py::arg("chart"), py::arg("state"), py::arg("t_max"), py::arg("tol") = 1e-6);

    mod.def("energy", py::overload_cast<const MetricChart&>(&energy), py::arg("chart"));
    mod.def(
        "clairaut",
        [](const MetricChart& m, const py::object& kx, const py::object& ky) {
            return clairaut(m, {as_field(kx), as_field(ky)});
        },
        py::arg("chart"), py::arg("kx"), py::arg("ky"));
    mod.def("darboux_integral", [](const MetricChart& g, const MetricChart& gb) { return darboux_integral(g, gb); },
            py::arg("g"), py::arg("gbar"));
    mod.def(
        "check_conservation",
        [](const MetricChart& m, const FiberIntegral& I, int n_samples, double t_max, std::uint64_t seed,
           double threshold) {
            ConservationOptions o;
            o.n_samples = n_samples;
            o.t_max = t_max;
            o.seed = seed;
            o.threshold = threshold;
            return to_python(to_json(check_conservation(m, I, o)));
        },
        py::arg("chart"), py::arg("integral"), py::arg("n_samples") = 20, py::arg("t_max") = 1.0,
        py::arg("seed") = 1, py::arg("threshold") = 1e-6);

    mod.def(
        "check_projective_equivalence",
        [](const MetricChart& g, const MetricChart& gb, std::uint64_t seed, int n_samples, double drift_tol,
           double overlap_tol) {
            EquivalenceOptions o;
            o.seed = seed;
            o.n_samples = n_samples;
            o.drift_tol = drift_tol;
            o.overlap_tol = overlap_tol;
            return to_python(to_json(check_projective_equivalence(g, gb, o)));
        },
        py::arg("g"), py::arg("gbar"), py::arg("seed") = 1, py::arg("n_samples") = 20, py::arg("drift_tol") = 1e-6,
        py::arg("overlap_tol") = 1e-4);
    mod.def(
        "check_isometry",
        [](const MetricChart& g, const py::object& phi, double tol) {
            return to_python(to_json(check_isometry(g, as_map(phi), tol)));
        },
        py::arg("chart"), py::arg("map"), py::arg("tol") = 1e-8);
    mod.def(
        "check_affinity",
        [](const MetricChart& g, const py::object& phi, double tol) {
            return to_python(to_json(check_affinity(g, as_map(phi), tol)));
        },
        py::arg("chart"), py::arg("map"), py::arg("tol") = 1e-8);
    mod.def(
        "liouville_isometry_search",
        [](const py::object& h1, const py::object& h2, double period) {
            return to_python(to_json(liouville_isometry_search(as_field(h1), as_field(h2), period)));
        },
        py::arg("h1"), py::arg("h2"), py::arg("period") = 1.0);

    mod.def("band_rescaling_residual", &band_rescaling_residual, py::arg("a"), py::arg("l"), py::arg("z"), py::arg("mu"), py::arg("beta"));
    mod.def("tannery_reparam_x", &tannery_reparam_x, py::arg("t"));

    mod.def(
        "run_criterion",
        [](int id, std::uint64_t seed) {
            AcceptanceOptions o;
            o.seed = seed;
            CriterionResult r;
            {
                py::gil_scoped_release release;
                r = run_criterion(id, o);
            }
            return to_python(to_json(r));
        },
        py::arg("id"), py::arg("seed") = 1);
    mod.def(
        "run_acceptance",
        [](std::uint64_t seed) {
            AcceptanceOptions o;
            o.seed = seed;
            AcceptanceSummary s;
            {
                py::gil_scoped_release release;
                s = run_acceptance(o);
            }
            return to_python(to_json(s));
        },
        py::arg("seed") = 1);
}
