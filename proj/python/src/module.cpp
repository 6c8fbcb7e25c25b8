#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "hsf/flow.hpp"
#include "hsf/forests.hpp"
#include "hsf/io.hpp"
#include "hsf/kernels.hpp"
#include "hsf/lemmas.hpp"
#include "hsf/propagators.hpp"

namespace py = pybind11;

namespace {

hsf::BoundaryKind make_bc(const std::string& name, double c) {
  hsf::Bc kind = hsf::parse_bc(name);
  if (kind == hsf::Bc::Robin) return hsf::BoundaryKind::robin(c);
  return {kind, 0.0};
}

hsf::flow::FlowConfig flow_config(double coupling, double m, const std::string& bc, double c,
                                  double lambda0, int steps_per_decade) {
  hsf::flow::FlowConfig f;
  f.coupling = coupling;
  f.mass = m;
  f.bc = make_bc(bc, c);
  f.lambda0 = lambda0;
  f.steps_per_decade = steps_per_decade;
  return f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Half-space heat kernels, cutoff propagators, forests, lemma sweeps and one-loop flows";

  py::register_exception<hsf::PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<hsf::flow::IncompleteFlowError>(m, "IncompleteFlowError", PyExc_RuntimeError);

  m.def("kernel", [](const std::string& bc, double c, double tau, double z, double zp) {
          auto b = make_bc(bc, c);
          hsf::KernelQuery q{tau, z, zp};
          return b.kind == hsf::Bc::Bulk ? hsf::eval_bulk(q) : hsf::eval_kernel({1.0, b}, q);
        },
        py::arg("bc"), py::arg("c") = 0.0, py::arg("tau"), py::arg("z"), py::arg("zp"));
  m.def("surface_kernel", [](const std::string& bc, double c, double tau, double z, double zp) {
          return hsf::eval_surface_kernel({1.0, make_bc(bc, c)}, {tau, z, zp});
        },
        py::arg("bc"), py::arg("c") = 0.0, py::arg("tau"), py::arg("z"), py::arg("zp"));

  m.def("flowing_propagator",
        [](const std::string& bc, double c, double m, double p, double z, double zp, double lambda,
           double lambda0, const std::string& part) {
          hsf::PropagatorQuery q{p, z, zp, {m, make_bc(bc, c)}, {lambda, lambda0}};
          return hsf::flowing_propagator(q, hsf::parse_part(part));
        },
        py::arg("bc"), py::arg("c") = 0.0, py::arg("m") = 1.0, py::arg("p"), py::arg("z"), py::arg("zp"),
        py::arg("lambda_"), py::arg("lambda0"), py::arg("part") = "full");
  m.def("closed_form_propagator",
        [](const std::string& bc, double c, double m, double p, double z, double zp) {
          return hsf::closed_form_propagator(make_bc(bc, c), p, z, zp, m);
        },
        py::arg("bc"), py::arg("c") = 0.0, py::arg("m") = 1.0, py::arg("p"), py::arg("z"), py::arg("zp"));
  m.def("proper_time_propagator",
        [](const std::string& bc, double c, double m, double p, double z, double zp) {
          return hsf::proper_time_propagator(make_bc(bc, c), p, z, zp, m);
        },
        py::arg("bc"), py::arg("c") = 0.0, py::arg("m") = 1.0, py::arg("p"), py::arg("z"), py::arg("zp"));
  m.def("cdot_momentum_integral", &hsf::cdot_momentum_integral, py::arg("lambda_"), py::arg("m") = 1.0);

  m.def("enumerate_forests",
        [](int s, int l, int max_internal) {
          std::vector<std::string> out;
          for (const auto& w : hsf::enumerate_all_forests(s, l, max_internal)) out.push_back(hsf::to_json(w).dump());
          return out;
        },
        py::arg("s"), py::arg("l"), py::arg("max_internal") = 8, "Forests as JSON strings");
  m.def("validate_forest",
        [](const std::string& text) {
          auto v = hsf::validate(hsf::forest_from_json(nlohmann::json::parse(text)));
          return py::make_tuple(v.ok, v.reason);
        },
        py::arg("forest_json"));
  m.def("v2_bound", &hsf::v2_bound, py::arg("s"), py::arg("l"));

  m.def("run_lemma",
        [](const std::string& name, std::size_t samples, std::uint64_t seed) {
          hsf::SweepConfig cfg;
          cfg.samples = samples;
          cfg.seed = seed;
          auto r = hsf::run_lemma(name, cfg);
          py::dict checks;
          for (const auto& [k, c] : r.checks)
            checks[py::str(k)] = py::dict(py::arg("samples") = c.samples, py::arg("violations") = c.violations,
                                          py::arg("constant") = c.constant,
                                          py::arg("batch_spread") = c.batch_spread);
          std::vector<std::tuple<std::string, double, double, double>> rows;
          for (const auto& row : r.rows) rows.emplace_back(row.check, row.lhs, row.rhs, row.ratio);
          return py::dict(py::arg("lemma") = r.lemma, py::arg("passed") = r.passed(),
                          py::arg("violations") = r.violations(), py::arg("worst_spread") = r.worst_spread(),
                          py::arg("checks") = checks, py::arg("rows") = rows);
        },
        py::arg("name"), py::arg("samples") = 1000, py::arg("seed") = 7);

  m.def("bulk_tadpole",
        [](double coupling, double m, double lambda0, int steps) {
          auto t = hsf::flow::integrate_bulk_tadpole(flow_config(coupling, m, "bulk", 0.0, lambda0, steps));
          return py::dict(py::arg("a1_lambda0") = t.a_lambda0, py::arg("a1_zero") = t.a_zero);
        },
        py::arg("coupling") = 1.0, py::arg("m") = 1.0, py::arg("lambda0") = 10.0, py::arg("steps_per_decade") = 400);
  m.def("surface_tadpole",
        [](double coupling, double m, const std::string& bc, double c, double lambda0, int steps) {
          auto t = hsf::flow::integrate_surface_tadpole(flow_config(coupling, m, bc, c, lambda0, steps));
          std::vector<std::tuple<double, double, double>> series;
          for (const auto& p : t.series) series.emplace_back(p.lambda, p.s, p.e);
          return py::dict(py::arg("s1_lambda0") = t.s_lambda0, py::arg("e1_lambda0") = t.e_lambda0,
                          py::arg("h1_lambda0") = t.h_lambda0, py::arg("s1_zero") = t.s_zero,
                          py::arg("e1_zero") = t.e_zero, py::arg("series") = series);
        },
        py::arg("coupling") = 1.0, py::arg("m") = 1.0, py::arg("bc") = "robin", py::arg("c") = 1.0,
        py::arg("lambda0") = 50.0, py::arg("steps_per_decade") = 400);
  m.def("amputation",
        [](double s_ct, double e_ct, double c, double m, double p, double y1, double y2) {
          auto a = hsf::flow::amputation_comparison(s_ct, e_ct, c, m, p, y1, y2);
          return py::dict(py::arg("lhs127") = a.lhs127, py::arg("rhs127") = a.rhs127,
                          py::arg("lhs128") = a.lhs128, py::arg("rhs128") = a.rhs128,
                          py::arg("strict127") = a.strict127, py::arg("strict128") = a.strict128,
                          py::arg("degenerate") = a.degenerate);
        },
        py::arg("s_ct"), py::arg("e_ct"), py::arg("c") = 1.0, py::arg("m") = 1.0, py::arg("p") = 0.5,
        py::arg("y1") = 0.3, py::arg("y2") = 0.7);
  m.def("power_counting",
        [](const std::string& bc, double c, int r1, int r2) {
          auto r = hsf::flow::power_counting_probe(flow_config(1.0, 1.0, bc, c, 50.0, 400), r1, r2);
          return py::dict(py::arg("bulk") = r.bulk.exponent, py::arg("surface") = r.surface.exponent,
                          py::arg("gap") = r.gap);
        },
        py::arg("bc") = "neumann", py::arg("c") = 0.0, py::arg("r1") = 0, py::arg("r2") = 0);
}
