// Python bindings for the main operations: operator algebra, quantum objects,
// the three robustness quantifiers, and the discrimination-game layer.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlf/io.hpp"
#include "nlf/verify.hpp"

namespace py = pybind11;
using namespace nlf;

namespace {

HermitianOperator make_operator(const Matrix& entries, const std::vector<int>& dims) {
  return HermitianOperator(dims, entries);
}

py::dict report_to_dict(const RobustnessReport& rep) {
  py::dict d;
  d["value"] = rep.value;
  d["gap"] = rep.gap;
  d["certificate_residual"] = rep.certificate_residual;
  d["relaxation"] = rep.relaxation;
  d["status"] = conic::to_string(rep.status);
  d["iterations"] = rep.iterations;
  d["wall_seconds"] = rep.wall_seconds;
  py::list cert;
  for (const auto& a : rep.certificate) cert.append(a.matrix());
  d["certificate"] = cert;
  d["certificate_shape"] = py::make_tuple(rep.cert_outcomes_a, rep.cert_outcomes_b);
  return d;
}

py::dict score_to_dict(const ScoreReport& rep) {
  py::dict d;
  d["quantum_score"] = rep.quantum_score;
  d["classical_score"] = rep.classical_score;
  d["ratio"] = rep.ratio;
  d["reference_value"] = rep.reference_value;
  d["quantum_method"] = rep.quantum_method;
  d["classical_method"] = rep.classical_method;
  return d;
}

}  // namespace

PYBIND11_MODULE(_nlforge, m) {
  m.doc() = "conic robustness quantifiers of Buscemi nonlocality and their discrimination games";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<HermitianOperator>(m, "HermitianOperator")
      .def(py::init([](const Matrix& entries, const std::vector<int>& dims) {
             return make_operator(entries, dims);
           }),
           py::arg("entries"), py::arg("dims"))
      .def_property_readonly("dims", &HermitianOperator::dims)
      .def_property_readonly("matrix", [](const HermitianOperator& x) { return x.matrix(); })
      .def("trace", &HermitianOperator::trace)
      .def("__repr__", [](const HermitianOperator& x) {
        return "<HermitianOperator dim=" + std::to_string(x.dim()) + ">";
      });

  py::class_<BipartiteState>(m, "BipartiteState")
      .def(py::init([](const Matrix& entries, const std::vector<int>& dims) {
             return BipartiteState(HermitianOperator(dims, entries));
           }),
           py::arg("entries"), py::arg("dims"))
      .def_property_readonly("matrix", [](const BipartiteState& s) { return s.op().matrix(); })
      .def_property_readonly("dims", [](const BipartiteState& s) { return s.op().dims(); });

  py::class_<Povm>(m, "Povm")
      .def(py::init([](const std::vector<Matrix>& elements, const std::vector<int>& dims) {
             std::vector<HermitianOperator> ops;
             for (const auto& e : elements) ops.emplace_back(dims, e);
             return Povm(std::move(ops));
           }),
           py::arg("elements"), py::arg("dims"))
      .def_property_readonly("outcomes", &Povm::outcomes)
      .def("element", [](const Povm& p, int a) { return p.element(a).matrix(); });

  py::class_<DistributedMeasurement>(m, "DistributedMeasurement")
      .def(py::init([](int oa, int ob, const std::vector<Matrix>& elements,
                       const std::vector<int>& dims) {
             std::vector<HermitianOperator> ops;
             for (const auto& e : elements) ops.emplace_back(dims, e);
             return DistributedMeasurement(oa, ob, std::move(ops));
           }),
           py::arg("outcomes_a"), py::arg("outcomes_b"), py::arg("elements"), py::arg("dims"))
      .def_property_readonly("outcomes_a", &DistributedMeasurement::outcomes_a)
      .def_property_readonly("outcomes_b", &DistributedMeasurement::outcomes_b)
      .def("element", [](const DistributedMeasurement& m_, int a, int b) {
        return m_.element(a, b).matrix();
      })
      .def("no_signalling_residual", &DistributedMeasurement::no_signalling_residual);

  py::class_<TeleportationInstrument>(m, "TeleportationInstrument")
      .def(py::init([](const std::vector<Matrix>& choi, const std::vector<int>& dims) {
             std::vector<HermitianOperator> ops;
             for (const auto& c : choi) ops.emplace_back(dims, c);
             return TeleportationInstrument(std::move(ops));
           }),
           py::arg("choi"), py::arg("dims"))
      .def_property_readonly("outcomes", &TeleportationInstrument::outcomes)
      .def("choi", [](const TeleportationInstrument& t, int a) { return t.choi(a).matrix(); });

  py::class_<StateEnsemble>(m, "StateEnsemble")
      .def(py::init([](int nx, int ny, const std::vector<double>& probs,
                       const std::vector<Matrix>& states, const std::vector<int>& dims) {
             std::vector<HermitianOperator> ops;
             for (const auto& s : states) ops.emplace_back(dims, s);
             return StateEnsemble(nx, ny, probs, std::move(ops));
           }),
           py::arg("nx"), py::arg("ny"), py::arg("probs"), py::arg("states"), py::arg("dims"))
      .def_property_readonly("nx", &StateEnsemble::nx)
      .def_property_readonly("ny", &StateEnsemble::ny)
      .def("prob", &StateEnsemble::prob)
      .def("state", [](const StateEnsemble& e, int x, int y) { return e.state(x, y).matrix(); });

  // linalg
  m.def("max_entangled", [](int d) { return max_entangled(d).matrix(); }, py::arg("d"));
  m.def("heisenberg_weyl", &heisenberg_weyl, py::arg("d"));
  m.def("tensor", [](const HermitianOperator& a, const HermitianOperator& b) { return tensor(a, b); });
  m.def("partial_trace",
        [](const HermitianOperator& x, const std::vector<int>& keep) { return partial_trace(x, keep); });
  m.def("partial_transpose",
        [](const HermitianOperator& x, int sub) { return partial_transpose(x, sub); });
  m.def("min_eigenvalue", [](const HermitianOperator& x) { return min_eigenvalue(x); });
  m.def("realify", [](const Matrix& x) { return conic::realify(x); });

  // qobj
  m.def("bell_measurement", &bell_measurement, py::arg("d"));
  m.def("isotropic_state", &isotropic_state, py::arg("d"), py::arg("p"));
  m.def("random_state", &random_state, py::arg("dims"), py::arg("rank"), py::arg("seed"));
  m.def("random_povm", &random_povm, py::arg("dims"), py::arg("outcomes"), py::arg("seed"));
  m.def("build_distributed", &build_distributed, py::arg("alice"), py::arg("bob"), py::arg("state"));
  m.def("teleportation_instrument", &teleportation_instrument, py::arg("alice"), py::arg("state"));

  // robustness
  m.def("robn", [](const DistributedMeasurement& mm, double tol) { return report_to_dict(robn(mm, tol)); },
        py::arg("measurement"), py::arg("tol") = 1e-8);
  m.def("rot", [](const TeleportationInstrument& t, double tol) { return report_to_dict(rot(t, tol)); },
        py::arg("instrument"), py::arg("tol") = 1e-8);
  m.def("roe", [](const BipartiteState& rho, double tol) { return report_to_dict(roe(rho, tol)); },
        py::arg("state"), py::arg("tol") = 1e-8);
  m.def("robn_of_state",
        [](const BipartiteState& rho, double tol) {
          auto rep = robn_of_state(rho, {tol, false, 0});
          py::dict d = report_to_dict(rep.robn_report);
          d["roe_value"] = rep.roe_value;
          d["consistent"] = rep.consistent;
          return d;
        },
        py::arg("state"), py::arg("tol") = 1e-8);

  // games
  m.def("optimal_dsd_ensemble",
        [](const std::vector<Matrix>& cert, int oa, int ob, const std::vector<int>& dims) {
          std::vector<HermitianOperator> ops;
          for (const auto& c : cert) ops.emplace_back(dims, c);
          return optimal_dsd_ensemble(ops, oa, ob);
        },
        py::arg("certificate"), py::arg("outcomes_a"), py::arg("outcomes_b"), py::arg("dims"));
  m.def("dsd_classical_score",
        [](const StateEnsemble& g, double tol) { return dsd_classical_score(g, tol); },
        py::arg("ensemble"), py::arg("tol") = 1e-8);
  m.def("dsd_quantum_score", &dsd_quantum_score, py::arg("ensemble"), py::arg("measurement"));
  m.def("verify_result1",
        [](const DistributedMeasurement& mm, double tol) { return score_to_dict(verify_result1(mm, tol)); },
        py::arg("measurement"), py::arg("tol") = 1e-8);
  m.def("min_accessible_info",
        [](const DistributedMeasurement& mm, double tol) {
          auto rep = min_accessible_info(mm, tol);
          py::dict d;
          d["bits"] = rep.bits;
          d["witness_bits"] = rep.witness_bits;
          d["robn_value"] = rep.robn_value;
          d["quantum_guess"] = rep.quantum_guess;
          d["classical_guess"] = rep.classical_guess;
          return d;
        },
        py::arg("measurement"), py::arg("tol") = 1e-8);
  m.def("min_entropy", &min_entropy, py::arg("p"));

  // io + verification suites
  m.def("load_state", [](const std::string& path) {
    return io::state_from_json(io::read_document(path, "state"));
  });
  m.def("load_measurement", [](const std::string& path) {
    return io::measurement_from_json(io::read_document(path, "distributed_measurement"));
  });
  m.def("run_suite", [](const std::string& name, int seeds, double tol) {
    auto res = verify::run_suite_by_name(name, seeds, 2, tol);
    py::dict d;
    d["suite"] = res.suite;
    d["passed"] = res.passed;
    d["total"] = res.total;
    d["failed"] = res.failed;
    d["max_residual"] = res.max_residual;
    return d;
  }, py::arg("name"), py::arg("seeds") = 10, py::arg("tol") = 1e-8);

  m.attr("__version__") = io::kLibraryVersion;
}
