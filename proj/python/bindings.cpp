#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "spherimax/core.hpp"
#include "spherimax/eta.hpp"
#include "spherimax/functionals.hpp"
#include "spherimax/solvers.hpp"
#include "spherimax/theorems.hpp"

namespace py = pybind11;
using namespace spherimax;

namespace {

ProblemInstance make_instance(const std::string& functional,
                              const std::map<std::string, double>& params, int n,
                              double rho, const Tolerances& tol) {
  return ProblemInstance(zoo_get(functional, params, n), n, rho, tol);
}

py::dict sample_to_dict(const EtaSample& s) {
  py::dict d;
  d["r"] = s.r;
  d["eta"] = s.eta;
  d["psi"] = s.psi;
  d["representative"] = s.representative;
  d["gamma"] = s.gamma;
  d["residual"] = s.residual;
  d["dinkelbach_iters"] = s.dinkelbach_iters;
  d["radial_manifold"] = s.radial_manifold;
  d["singleton"] = s.singleton();
  return d;
}

py::dict curve_to_dict(const EtaCurve& c) {
  py::dict d;
  d["rho"] = c.rho;
  d["beta"] = c.beta;
  d["delta"] = c.delta.is_finite() ? py::object(py::float_(c.delta.value()))
                                   : py::object(py::str("inf"));
  py::list samples;
  for (const EtaSample& s : c.samples) samples.append(sample_to_dict(s));
  d["samples"] = samples;
  py::list errors;
  for (const SampleError& e : c.sample_errors) {
    py::dict ed;
    ed["r"] = e.r;
    ed["message"] = e.message;
    errors.append(ed);
  }
  d["sample_errors"] = errors;
  d["violations"] = c.violations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_spherimax, m) {
  m.doc() = "constrained maximizers on spheres: level curves, multiplier maps, "
            "and multiplicity certificates";

  py::register_exception<Error>(m, "SpherimaxError");

  py::class_<Tolerances>(m, "Tolerances")
      .def(py::init<>())
      .def_readwrite("tol_opt", &Tolerances::tol_opt)
      .def_readwrite("tol_res", &Tolerances::tol_res)
      .def_readwrite("tol_val", &Tolerances::tol_val)
      .def_readwrite("tol_cluster", &Tolerances::tol_cluster)
      .def_readwrite("grid_points", &Tolerances::grid_points)
      .def_readwrite("restarts", &Tolerances::restarts);

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def(py::init(&make_instance), py::arg("functional"), py::arg("params"),
           py::arg("n"), py::arg("rho"), py::arg("tolerances") = Tolerances{})
      .def_readonly("n", &ProblemInstance::n)
      .def_readonly("rho", &ProblemInstance::rho)
      .def("describe", &ProblemInstance::describe)
      .def("value",
           [](const ProblemInstance& inst, const Vector& x) {
             return inst.functional.value(x);
           })
      .def("gradient", [](const ProblemInstance& inst, const Vector& x) {
        return gradient_at(inst.functional, x);
      });

  m.def(
      "check_condition",
      [](const ProblemInstance& inst, std::uint64_t seed) {
        const ConditionResult c = check_condition(inst, seed);
        py::dict d;
        d["holds"] = c.holds;
        d["beta"] = c.beta;
        d["delta"] = c.delta.is_finite() ? py::object(py::float_(c.delta.value()))
                                         : py::object(py::str("inf"));
        return d;
      },
      py::arg("instance"), py::arg("seed") = kDefaultSeed,
      "Feasibility gate beta/rho < delta; returns beta and delta as well.");

  m.def(
      "compute_eta",
      [](const ProblemInstance& inst, double r, std::uint64_t seed) {
        return sample_to_dict(compute_eta(inst, r, seed));
      },
      py::arg("instance"), py::arg("r"), py::arg("seed") = kDefaultSeed,
      "Evaluate eta(r), its maximizer set, and psi at a single level r.");

  m.def(
      "tabulate_curve",
      [](const ProblemInstance& inst, double r_lo, double r_hi, int count,
         std::uint64_t seed) {
        return curve_to_dict(tabulate_curve(inst, r_lo, r_hi, count, seed));
      },
      py::arg("instance"), py::arg("r_lo"), py::arg("r_hi"), py::arg("count"),
      py::arg("seed") = kDefaultSeed,
      "Sample eta over [r_lo, r_hi] and certify monotonicity properties.");

  m.def(
      "build_phi_map",
      [](const ProblemInstance& inst, double r_lo, double r_hi, int count, int points,
         std::uint64_t seed) {
        const EtaCurve curve = tabulate_curve(inst, r_lo, r_hi, count, seed);
        const PhiMap map = build_phi_map(inst, curve, points, seed);
        py::list rows;
        for (const PhiEntry& e : map.table) {
          py::dict d;
          d["lambda"] = e.lambda;
          d["phi"] = e.phi;
          d["residual_max"] = e.residual_max;
          rows.append(d);
        }
        return rows;
      },
      py::arg("instance"), py::arg("r_lo"), py::arg("r_hi"), py::arg("count"),
      py::arg("points") = 10, py::arg("seed") = kDefaultSeed,
      "Tabulate the multiplier map phi(lambda) = psi(eta^{-1}(2 lambda)).");

  m.def(
      "detect_multiplicity",
      [](const ProblemInstance& inst, double r_lo, double r_hi, int count,
         double rho_tilde, std::uint64_t seed) {
        const EtaCurve curve = tabulate_curve(inst, r_lo, r_hi, count, seed);
        py::dict d;
        try {
          const MultiplicityResult res = detect_multiplicity(inst, curve, rho_tilde, seed);
          d["found"] = true;
          d["mode"] = multiplicity_mode_name(res.mode);
          d["degenerate"] = res.degenerate;
          d["lambda_star"] = res.lambda_star;
          d["r_star"] = res.r_star;
          d["solutions"] = res.solutions;
          d["residual_max"] = res.residual_max;
          d["penalized_gap"] = res.penalized_gap;
        } catch (const MultiplicityNotFound& e) {
          d["found"] = false;
          d["error"] = std::string(e.what());
          d["bracket"] = py::make_tuple(e.bracket_lo(), e.bracket_hi());
        }
        return d;
      },
      py::arg("instance"), py::arg("r_lo"), py::arg("r_hi"), py::arg("count"),
      py::arg("rho_tilde"), py::arg("seed") = kDefaultSeed,
      "Search the level curve for two sphere maximizers sharing one multiplier.");

  m.def(
      "max_on_sphere",
      [](const ProblemInstance& inst, double s, std::uint64_t seed) {
        const SolveResult r = max_on_sphere(inst, s, seed);
        py::dict d;
        d["point"] = r.point;
        d["value"] = r.value;
        d["stationarity"] = r.stationarity;
        return d;
      },
      py::arg("instance"), py::arg("s"), py::arg("seed") = kDefaultSeed,
      "Maximize the functional on the sphere |x|^2 = s.");

  m.attr("DEFAULT_SEED") = kDefaultSeed;
}
