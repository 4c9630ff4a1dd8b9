#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "symdyn/asymptotics.hpp"
#include "symdyn/cli.hpp"
#include "symdyn/errors.hpp"
#include "symdyn/model_file.hpp"
#include "symdyn/oracle.hpp"
#include "symdyn/subsystem.hpp"

namespace py = pybind11;
using namespace symdyn;

namespace {

// A resolved model together with its source description.
struct PyProblem {
  io::ModelFile file;
  io::Problem problem;

  explicit PyProblem(io::ModelFile f) : file(std::move(f)), problem(io::build_problem(file)) {}
};

PyProblem with_delta(const PyProblem& p, const std::vector<std::string>& labels) {
  io::ModelFile f = p.file;
  f.delta = labels;
  return PyProblem(std::move(f));
}

std::string analysis_text(const PyProblem& p, std::size_t nmax) {
  const SubsystemAnalysis a = analyze(p.problem.effective, p.problem.delta);
  const GibbsMeasure mu = equilibrium(p.problem.effective);
  const AsymptoticsReport r = report(a, mu, std::max(nmax, a.period));
  return io::analysis_json(p.file, p.problem, a, mu, r).dump();
}

py::dict sequence(const PyProblem& p, std::size_t nmax) {
  const SubsystemAnalysis a = analyze(p.problem.effective, p.problem.delta);
  const GibbsMeasure mu = equilibrium(p.problem.effective);
  const AsymptoticsReport r = report(a, mu, nmax);
  py::dict out;
  out["mu"] = r.mu_seq;
  out["log_mu"] = r.log_mu_seq;
  out["scaled"] = r.scaled_seq;
  out["predicted"] = r.predicted;
  out["abs_error"] = r.abs_error;
  out["spread"] = r.spread;
  out["converges_overall"] = r.converges_overall;
  out["verdict"] = std::string(to_string(r.verdict));
  out["p_delta"] = r.p_delta;
  out["period"] = r.period;
  return out;
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

py::dict perron_of(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  DenseMatrix w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw InvalidArgument("matrix must be square");
    for (std::size_t j = 0; j < n; ++j) w(i, j) = rows[i][j];
  }
  const PerronData pd = perron(w);
  py::dict out;
  out["eigenvalue"] = pd.lambda;
  out["right"] = pd.right;
  out["left"] = pd.left;
  out["period"] = pd.period;
  return out;
}

}  // namespace

PYBIND11_MODULE(_symdyn, m) {
  m.doc() = "Restricted transfer operators and escape asymptotics on subshifts of finite type";

  py::register_exception<io::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<PyProblem>(m, "Problem")
      .def_static("from_json", [](const std::string& text) { return PyProblem(io::parse_model_text(text)); },
                  py::arg("text"), "Model description or emitted analysis document.")
      .def_static("load", [](const std::string& path) { return PyProblem(io::load_model(path)); },
                  py::arg("path"))
      .def_static("paper4", [](double ep, double eq) { return PyProblem(io::paper4_model(ep, eq)); },
                  py::arg("ep") = 0.2, py::arg("eq") = 0.3, "Built-in three-symbol example.")
      .def("with_delta", &with_delta, py::arg("labels"))
      .def("to_json", [](const PyProblem& p) { return io::to_json(p.file).dump(); })
      .def_property_readonly("alphabet", [](const PyProblem& p) { return p.file.alphabet; })
      .def_property_readonly("delta", [](const PyProblem& p) { return p.file.delta; })
      .def_property_readonly("pressure", [](const PyProblem& p) {
        return pressure(perron(build_transfer(p.problem.effective)));
      })
      .def("mu_delta_n", [](const PyProblem& p, std::size_t n) {
        const SubsystemAnalysis a = analyze(p.problem.effective, p.problem.delta);
        return mu_delta_n(a, equilibrium(p.problem.effective), n);
      }, py::arg("n"))
      .def("brute_mu_delta_n", [](const PyProblem& p, std::size_t n) {
        return oracle::brute_mu_delta_n(p.problem.model, equilibrium(p.problem.effective),
                                        p.problem.delta, n);
      }, py::arg("n"));

  m.def("analysis_json", &analysis_text, py::arg("problem"), py::arg("nmax") = 40,
        "Analysis document as a JSON string.");
  m.def("sequence", &sequence, py::arg("problem"), py::arg("nmax") = 40);
  m.def("perron", &perron_of, py::arg("matrix"),
        "Perron eigenvalue and eigenvectors of an irreducible nonnegative matrix.");
  m.def("run_cli", &run_cli, py::arg("args"), "Returns (exit_code, stdout, stderr).");
}
