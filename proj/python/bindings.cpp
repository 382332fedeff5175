#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pdcontact/cones.hpp"
#include "pdcontact/matrix_market.hpp"
#include "pdcontact/fem.hpp"
#include "pdcontact/oracle.hpp"
#include "pdcontact/pdsolver.hpp"
#include "pdcontact/problem_io.hpp"
#include "pdcontact/residuals.hpp"
#include "pdcontact/soclcp.hpp"

namespace py = pybind11;
using namespace pdcontact;

namespace {

py::tuple reaction_tuple(const ReactionPoint& r) {
  return py::make_tuple(r.normal, std::vector<double>(r.tangential.begin(), r.tangential.begin() + r.m));
}

fem::BenchmarkOptions options_for(const std::string& kind, py::object traction, py::object gap,
                                  py::object mu, py::object length, const std::string& bc) {
  fem::BenchmarkOptions o = kind == "example1" ? fem::example1_defaults() : fem::example2_defaults();
  if (!traction.is_none()) o.traction = traction.cast<double>();
  if (!gap.is_none()) o.gap = gap.cast<double>();
  if (!mu.is_none()) o.mu = mu.cast<double>();
  if (!length.is_none()) o.length = length.cast<double>();
  o.bc = bc;
  return o;
}

py::dict report_dict(const verify::ResidualReport& rep) {
  py::dict d;
  d["resid_eq"] = rep.resid_eq;
  d["resid_compl"] = rep.resid_compl;
  d["resid_pen"] = rep.resid_pen;
  d["cone_violation"] = rep.cone_violation;
  d["free"] = rep.fractions.free;
  d["slip"] = rep.fractions.slip;
  d["stick"] = rep.fractions.stick;
  std::vector<std::string> states;
  for (auto s : rep.states) states.emplace_back(verify::to_string(s));
  d["states"] = states;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Accelerated primal-dual solver for frictional contact";

  py::register_exception<IoError>(m, "IoError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

  py::class_<ProblemInstance>(m, "Problem")
      .def_property_readonly("dofs", &ProblemInstance::dofs)
      .def_property_readonly("c", [](const ProblemInstance& p) { return p.contact.c; })
      .def_property_readonly("m", [](const ProblemInstance& p) { return p.contact.m; })
      .def_readwrite("mu", &ProblemInstance::mu)
      .def_readwrite("p", &ProblemInstance::p)
      .def_property_readonly("g", [](const ProblemInstance& p) { return p.contact.g; })
      .def_property_readonly("kind", [](const ProblemInstance& p) { return p.info.kind; })
      .def("to_json", &io::problem_to_json)
      .def_static("from_json", &io::problem_from_json, py::arg("text"))
      .def("hash", &io::problem_hash)
      .def("__repr__", [](const ProblemInstance& p) {
        return "<Problem " + p.info.kind + " d=" + std::to_string(p.dofs()) +
               " c=" + std::to_string(p.contact.c) + ">";
      });

  m.def("read_problem", &io::read_problem, py::arg("path"));
  m.def("write_problem", &io::write_problem, py::arg("path"), py::arg("problem"));

  m.def(
      "gen",
      [](const std::string& kind, int n_y, py::object traction, py::object gap, py::object mu,
         py::object length, const std::string& bc) {
        if (kind != "example1" && kind != "example2") {
          throw std::invalid_argument("kind must be example1 or example2");
        }
        const auto o = options_for(kind, traction, gap, mu, length, bc);
        return kind == "example1" ? fem::build_example1(n_y, o) : fem::build_example2(n_y, o);
      },
      py::arg("kind"), py::arg("n_y"), py::arg("traction") = py::none(), py::arg("gap") = py::none(),
      py::arg("mu") = py::none(), py::arg("length") = py::none(), py::arg("bc") = "clamped",
      "Generate a benchmark problem");

  m.def(
      "solve",
      [](const ProblemInstance& p, double alpha0, double eps, std::size_t max_iters, double pcg_tol,
         std::size_t pcg_maxit) {
        solver::SolverConfig cfg;
        cfg.alpha0 = alpha0;
        cfg.eps = eps;
        cfg.max_outer = max_iters;
        cfg.pcg_tol = pcg_tol;
        cfg.pcg_maxit = pcg_maxit;
        solver::Solution s;
        {
          py::gil_scoped_release release;
          s = solver::pd_accelerated(p, cfg);
        }
        py::dict d;
        d["du"] = s.du;
        d["r"] = s.r;
        d["iterations"] = s.iterations;
        d["converged"] = s.converged;
        d["status"] = std::string(solver::to_string(s.status));
        d["sigma_T"] = s.spectral.sigma_T;
        d["mu_pi"] = s.spectral.mu_pi;
        return d;
      },
      py::arg("problem"), py::arg("alpha0") = 0.1, py::arg("eps") = 1e-12,
      py::arg("max_iters") = std::size_t(100000), py::arg("pcg_tol") = 1e-10,
      py::arg("pcg_maxit") = std::size_t(10000), "Run the accelerated primal-dual iteration");

  m.def(
      "residuals",
      [](const ProblemInstance& p, const Vector& du, const Vector& r) {
        return report_dict(verify::residual_report(p, du, r));
      },
      py::arg("problem"), py::arg("du"), py::arg("r"));

  m.def(
      "verify_soclcp",
      [](const ProblemInstance& p, const Vector& du, const Vector& r, double tol) {
        const auto rep = verify::verify_soclcp(p, du, r, {}, tol);
        py::dict d;
        d["passed"] = rep.passed();
        d["x_cone_violation"] = rep.x_cone_violation;
        d["y_cone_violation"] = rep.y_cone_violation;
        d["complementarity"] = rep.complementarity;
        d["first_equation"] = rep.first_equation;
        d["second_equation"] = rep.second_equation;
        return d;
      },
      py::arg("problem"), py::arg("du"), py::arg("r"), py::arg("tol") = 1e-6);

  m.def(
      "export_soclcp",
      [](const ProblemInstance& p, const std::filesystem::path& dir) {
        verify::export_matrix_market(verify::build_soclcp(p), dir);
      },
      py::arg("problem"), py::arg("dir"));

  m.def(
      "oracle",
      [](const ProblemInstance& p, double tol) {
        const auto res = verify::oracle_enumerate(p, tol);
        py::list out;
        for (const auto& s : res.solutions) {
          py::dict d;
          d["du"] = s.du;
          d["r"] = s.r;
          std::vector<std::string> states;
          for (auto st : s.states) states.emplace_back(verify::to_string(st));
          d["states"] = states;
          out.append(d);
        }
        return out;
      },
      py::arg("problem"), py::arg("tol") = 1e-10, "Enumerate all solutions of a small planar problem");

  m.def(
      "project_friction_cone",
      [](double s_n, const std::vector<double>& s_t, double mu) {
        return reaction_tuple(project_friction_cone(s_n, s_t, mu));
      },
      py::arg("s_n"), py::arg("s_t"), py::arg("mu"));
  m.def(
      "project_soc",
      [](double x0, const std::vector<double>& x1) { return reaction_tuple(project_soc(x0, x1)); },
      py::arg("x0"), py::arg("x1"));
}
