#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "fastcubic/bench.hpp"
#include "fastcubic/cubic_model.hpp"
#include "fastcubic/cubic_solver.hpp"
#include "fastcubic/errors.hpp"
#include "fastcubic/json_io.hpp"
#include "fastcubic/optimizer.hpp"

namespace py = pybind11;
namespace fc = fastcubic;

namespace {

// Reports cross the boundary as JSON text; the Python side parses them.
std::string dump(const fc::Json& j) { return j.dump(); }

fc::ProblemSpec make_problem(const std::string& name, const std::map<std::string, double>& params,
                             std::uint64_t seed) {
  fc::ProblemEntry entry{name, name, params};
  // Same stream as a bench cell with this seed.
  fc::SeededRng rng = fc::SeededRng(seed).split(1);
  return fc::build_problem(entry, rng);
}

fc::FastCubicConfig run_config(const fc::ProblemSpec& p, double eps, double c_const, int max_outer,
                               const std::string& solver, std::uint64_t seed) {
  fc::FastCubicConfig cfg;
  cfg.eps = eps;
  cfg.c_const = c_const;
  cfg.max_outer = max_outer;
  cfg.strategy = fc::solver_strategy_from_string(solver);
  cfg.seed = seed;
  cfg.domain_radius = p.domain_radius;
  return cfg;
}

py::tuple run_result(const fc::RunResult& r) { return py::make_tuple(r.x, dump(fc::to_json(r.report))); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cubic-regularized Newton optimization from Hessian-vector products";

  // Later registrations are tried first, so the base class goes first.
  const auto base = py::register_exception<fc::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<fc::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<fc::InvalidArgument>(m, "InvalidArgument", base.ptr());

  py::class_<fc::ProblemSpec>(m, "Problem")
      .def(py::init(&make_problem), py::arg("name"), py::arg("params") = std::map<std::string, double>{},
           py::arg("seed") = 0)
      .def_readonly("name", &fc::ProblemSpec::name)
      .def_readonly("dim", &fc::ProblemSpec::dim)
      .def_readonly("n_components", &fc::ProblemSpec::n_components)
      .def_readonly("domain_radius", &fc::ProblemSpec::domain_radius)
      .def_readonly("constants_estimated", &fc::ProblemSpec::constants_estimated)
      .def_property_readonly("L", [](const fc::ProblemSpec& p) { return p.oracle.params.L; })
      .def_property_readonly("L2", [](const fc::ProblemSpec& p) { return p.oracle.params.L2; })
      .def_property_readonly("saddle",
                             [](const fc::ProblemSpec& p) -> py::object {
                               if (!p.known_saddle) return py::none();
                               return py::cast(p.known_saddle->point);
                             })
      .def("value", [](const fc::ProblemSpec& p, const fc::Vector& x) { return p.oracle.value(x); })
      .def("gradient", [](const fc::ProblemSpec& p, const fc::Vector& x) { return p.oracle.gradient(x); })
      .def("hess_vec",
           [](const fc::ProblemSpec& p, const fc::Vector& x, const fc::Vector& v) { return p.oracle.hess_vec(x, v); })
      .def("hessian",
           [](const fc::ProblemSpec& p, const fc::Vector& x) { return fc::HvOperator::at(p.oracle, x).materialize(); })
      .def("finite_diff_hv_check",
           [](const fc::ProblemSpec& p, const fc::Vector& x, const fc::Vector& v, double r) {
             return fc::finite_diff_hv_check(p.oracle, x, v, r);
           },
           py::arg("x"), py::arg("v"), py::arg("r") = 1e-5)
      .def("certificate", [](const fc::ProblemSpec& p, const fc::Vector& x, double eps) {
        return dump(fc::to_json(fc::check_certificate(p.oracle, x, eps)));
      });

  m.def(
      "fast_cubic",
      [](const fc::ProblemSpec& p, const fc::Vector& x0, double eps, double c_const, int max_outer,
         const std::string& solver, std::uint64_t seed) {
        return run_result(fc::fast_cubic(p.oracle, x0, run_config(p, eps, c_const, max_outer, solver, seed)));
      },
      py::arg("problem"), py::arg("x0"), py::arg("eps"), py::arg("c_const") = 2.4e6, py::arg("max_outer") = 10000,
      py::arg("solver") = "agd", py::arg("seed") = 0);

  m.def(
      "exact_np_cubic",
      [](const fc::ProblemSpec& p, const fc::Vector& x0, double eps, double c_const, int max_outer) {
        return run_result(fc::exact_np_cubic(p.oracle, x0, run_config(p, eps, c_const, max_outer, "agd", 0)));
      },
      py::arg("problem"), py::arg("x0"), py::arg("eps"), py::arg("c_const") = 2.4e6, py::arg("max_outer") = 10000);

  m.def(
      "gradient_descent",
      [](const fc::ProblemSpec& p, const fc::Vector& x0, double eps, long long max_iter) {
        return run_result(fc::gradient_descent(p.oracle, x0, eps, max_iter, p.domain_radius));
      },
      py::arg("problem"), py::arg("x0"), py::arg("eps"), py::arg("max_iter") = 200000);

  m.def(
      "eval_m",
      [](const fc::Vector& g, const fc::Matrix& H, double L, const fc::Vector& h) {
        return fc::eval_m(fc::CubicSubproblem::from_dense(g, H, L, 1.0), h);
      },
      py::arg("g"), py::arg("H"), py::arg("L"), py::arg("h"));

  m.def(
      "exact_solve",
      [](const fc::Vector& g, const fc::Matrix& H, double L) {
        return dump(fc::to_json(fc::exact_solve_dense(g, H, L)));
      },
      py::arg("g"), py::arg("H"), py::arg("L"));

  m.def(
      "solve_cubic",
      [](const fc::Vector& g, const fc::Matrix& H, double L, double L2, double eps, std::uint64_t seed,
         const std::string& solver) {
        const fc::CubicSubproblem p = fc::CubicSubproblem::from_dense(g, H, L, L2);
        fc::SolverConfig sc;
        sc.kappa = fc::kappa_for(eps, L);
        sc.strategy = fc::solver_strategy_from_string(solver);
        fc::SeededRng rng(seed);
        const fc::CubicSolution sol = fc::fast_cubic_min(p, sc, rng);
        const fc::StepChoice step = fc::choose_step(p, sol);
        fc::Json j = fc::to_json(sol);
        j["step"] = fc::vector_to_json(step.h);
        j["m"] = step.m;
        j["kappa"] = sc.kappa;
        return dump(j);
      },
      py::arg("g"), py::arg("H"), py::arg("L"), py::arg("L2"), py::arg("eps"), py::arg("seed") = 0,
      py::arg("solver") = "agd");

  m.def("kappa_for", &fc::kappa_for, py::arg("eps"), py::arg("L"));
  m.def("stopping_threshold", &fc::stopping_threshold, py::arg("eps"), py::arg("L"), py::arg("c_const"));

  m.def(
      "run_matrix",
      [](const std::string& config_json, int threads) {
        const fc::ExperimentConfig cfg = fc::parse_experiment_config(fc::Json::parse(config_json));
        return fc::to_csv(fc::run_matrix(cfg, threads));
      },
      py::arg("config_json"), py::arg("threads") = 0);
}
