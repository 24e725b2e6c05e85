#include "nlf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace nlf::io {

namespace {

json envelope(const std::string& kind) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  return j;
}

const json& field(const json& j, const char* name, const std::string& where) {
  auto it = j.find(name);
  if (it == j.end()) throw InputError(where + ": missing field '" + name + "'");
  return *it;
}

std::vector<int> dims_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InputError(where + ": dims must be a nonempty array");
  std::vector<int> dims;
  for (const auto& d : j) {
    if (!d.is_number_integer() || d.get<int>() <= 0)
      throw InputError(where + ": dims entries must be positive integers");
    dims.push_back(d.get<int>());
  }
  return dims;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InputError(where + ": matrix must be a nonempty array of rows");
  const size_t nrows = j.size();
  const size_t ncols = j[0].is_array() ? j[0].size() : 0;
  if (ncols == 0) throw InputError(where + ": matrix rows must be nonempty arrays");
  Matrix m(nrows, ncols);
  for (size_t r = 0; r < nrows; ++r) {
    if (!j[r].is_array() || j[r].size() != ncols)
      throw InputError(where + ": ragged matrix at row " + std::to_string(r));
    for (size_t c = 0; c < ncols; ++c) {
      const auto& e = j[r][c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw InputError(where + ": entry (" + std::to_string(r) + "," + std::to_string(c) +
                         ") must be an [re, im] pair");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

json operator_to_json(const HermitianOperator& x) {
  json j;
  j["dims"] = x.dims();
  j["entries"] = matrix_to_json(x.matrix());
  return j;
}

HermitianOperator operator_from_json(const json& j, const std::string& where) {
  auto dims = dims_from_json(field(j, "dims", where), where);
  Matrix m = matrix_from_json(field(j, "entries", where), where);
  try {
    return HermitianOperator(std::move(dims), std::move(m));
  } catch (const InputError& e) {
    throw InputError(where + ": " + e.what());
  }
}

json state_to_json(const BipartiteState& s) {
  json j = envelope("state");
  j["op"] = operator_to_json(s.op());
  return j;
}

BipartiteState state_from_json(const json& doc) {
  return BipartiteState(operator_from_json(field(doc, "op", "state"), "state.op"));
}

json povm_to_json(const Povm& p) {
  json j = envelope("povm");
  json elems = json::array();
  for (const auto& e : p.elements()) elems.push_back(operator_to_json(e));
  j["elements"] = std::move(elems);
  return j;
}

Povm povm_from_json(const json& doc) {
  const auto& elems = field(doc, "elements", "povm");
  if (!elems.is_array() || elems.empty()) throw InputError("povm: elements must be a nonempty array");
  std::vector<HermitianOperator> out;
  for (size_t i = 0; i < elems.size(); ++i)
    out.push_back(operator_from_json(elems[i], "povm.elements[" + std::to_string(i) + "]"));
  return Povm(std::move(out));
}

json measurement_to_json(const DistributedMeasurement& m) {
  json j = envelope("distributed_measurement");
  j["outcomes_a"] = m.outcomes_a();
  j["outcomes_b"] = m.outcomes_b();
  json elems = json::array();
  for (const auto& e : m.elements()) elems.push_back(operator_to_json(e));
  j["elements"] = std::move(elems);
  return j;
}

DistributedMeasurement measurement_from_json(const json& doc) {
  const int oa = field(doc, "outcomes_a", "distributed_measurement").get<int>();
  const int ob = field(doc, "outcomes_b", "distributed_measurement").get<int>();
  const auto& elems = field(doc, "elements", "distributed_measurement");
  if (!elems.is_array()) throw InputError("distributed_measurement: elements must be an array");
  std::vector<HermitianOperator> out;
  for (size_t i = 0; i < elems.size(); ++i)
    out.push_back(operator_from_json(elems[i],
                                     "distributed_measurement.elements[" + std::to_string(i) + "]"));
  // Raw element lists carry no provenance; invariants are checked, the
  // no-signalling structure is not assumed.
  return DistributedMeasurement(oa, ob, std::move(out));
}

json instrument_to_json(const TeleportationInstrument& t) {
  json j = envelope("instrument");
  json blocks = json::array();
  for (const auto& c : t.choi()) blocks.push_back(operator_to_json(c));
  j["choi"] = std::move(blocks);
  return j;
}

TeleportationInstrument instrument_from_json(const json& doc) {
  const auto& blocks = field(doc, "choi", "instrument");
  if (!blocks.is_array() || blocks.empty())
    throw InputError("instrument: choi must be a nonempty array");
  std::vector<HermitianOperator> out;
  for (size_t i = 0; i < blocks.size(); ++i)
    out.push_back(operator_from_json(blocks[i], "instrument.choi[" + std::to_string(i) + "]"));
  return TeleportationInstrument(std::move(out));
}

json ensemble_to_json(const StateEnsemble& e) {
  json j = envelope("ensemble");
  j["shape"] = json::array({e.nx(), e.ny()});
  j["probs"] = e.probs();
  json states = json::array();
  for (const auto& s : e.states()) states.push_back(operator_to_json(s));
  j["states"] = std::move(states);
  return j;
}

StateEnsemble ensemble_from_json(const json& doc) {
  const auto& shape = field(doc, "shape", "ensemble");
  if (!shape.is_array() || shape.size() != 2) throw InputError("ensemble: shape must be [nx, ny]");
  const int nx = shape[0].get<int>(), ny = shape[1].get<int>();
  std::vector<double> probs = field(doc, "probs", "ensemble").get<std::vector<double>>();
  const auto& states = field(doc, "states", "ensemble");
  std::vector<HermitianOperator> out;
  for (size_t i = 0; i < states.size(); ++i)
    out.push_back(operator_from_json(states[i], "ensemble.states[" + std::to_string(i) + "]"));
  return StateEnsemble(nx, ny, std::move(probs), std::move(out));
}

json subroutine_to_json(const SimulationSubroutine& s) {
  json j = envelope("subroutine");
  j["weights"] = s.weights();
  json pa = json::array(), pb = json::array(), ca = json::array(), cb = json::array();
  auto stoch = [](const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  auto channel = [](const LinearMapOnOperators& ch) {
    json c;
    c["input_dims"] = ch.input_dims();
    c["output_dims"] = ch.output_dims();
    json ks = json::array();
    for (const auto& k : ch.kraus()) ks.push_back(matrix_to_json(k));
    c["kraus"] = std::move(ks);
    return c;
  };
  for (int l = 0; l < s.terms(); ++l) {
    pa.push_back(stoch(s.post_alice(l)));
    pb.push_back(stoch(s.post_bob(l)));
    ca.push_back(channel(s.pre_alice(l)));
    cb.push_back(channel(s.pre_bob(l)));
  }
  j["post_alice"] = std::move(pa);
  j["post_bob"] = std::move(pb);
  j["pre_alice"] = std::move(ca);
  j["pre_bob"] = std::move(cb);
  return j;
}

SimulationSubroutine subroutine_from_json(const json& doc) {
  std::vector<double> w = field(doc, "weights", "subroutine").get<std::vector<double>>();
  auto stoch = [](const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw InputError(where + ": stochastic matrix expected");
    Eigen::MatrixXd m(j.size(), j[0].size());
    for (size_t r = 0; r < j.size(); ++r)
      for (size_t c = 0; c < j[r].size(); ++c) m(r, c) = j[r][c].get<double>();
    return m;
  };
  auto channel = [](const json& j, const std::string& where) {
    auto in = dims_from_json(field(j, "input_dims", where), where);
    auto out = dims_from_json(field(j, "output_dims", where), where);
    std::vector<Matrix> ks;
    for (const auto& k : field(j, "kraus", where)) ks.push_back(matrix_from_json(k, where));
    return LinearMapOnOperators::from_kraus(std::move(ks), std::move(in), std::move(out));
  };
  std::vector<Eigen::MatrixXd> pa, pb;
  std::vector<LinearMapOnOperators> ca, cb;
  for (const auto& m : field(doc, "post_alice", "subroutine")) pa.push_back(stoch(m, "subroutine.post_alice"));
  for (const auto& m : field(doc, "post_bob", "subroutine")) pb.push_back(stoch(m, "subroutine.post_bob"));
  for (const auto& c : field(doc, "pre_alice", "subroutine")) ca.push_back(channel(c, "subroutine.pre_alice"));
  for (const auto& c : field(doc, "pre_bob", "subroutine")) cb.push_back(channel(c, "subroutine.pre_bob"));
  return SimulationSubroutine(std::move(w), std::move(pa), std::move(pb), std::move(ca), std::move(cb));
}

json robustness_report_to_json(const RobustnessReport& rep, const std::string& quantity) {
  json j = envelope("report");
  j["report_type"] = quantity;
  j["value"] = rep.value;
  j["gap"] = rep.gap;
  j["certificate_residual"] = rep.certificate_residual;
  j["relaxation"] = rep.relaxation;
  j["solver"] = {{"status", conic::to_string(rep.status)},
                 {"tolerance", rep.solve_tol},
                 {"iterations", rep.iterations}};
  j["wall_seconds"] = rep.wall_seconds;
  j["library_version"] = kLibraryVersion;
  j["certificate_shape"] = json::array({rep.cert_outcomes_a, rep.cert_outcomes_b});
  json cert;
  for (const auto& [name, op] : rep.dual_certificate) cert[name] = operator_to_json(op);
  j["dual_certificate"] = std::move(cert);
  json wit;
  for (const auto& [name, op] : rep.primal_witness) wit[name] = operator_to_json(op);
  j["primal_witness"] = std::move(wit);
  return j;
}

json score_report_to_json(const ScoreReport& rep, const std::string& task) {
  json j = envelope("report");
  j["report_type"] = task;
  j["quantum_score"] = rep.quantum_score;
  j["classical_score"] = rep.classical_score;
  j["ratio"] = rep.ratio;
  j["quantum_method"] = rep.quantum_method;
  j["classical_method"] = rep.classical_method;
  j["reference_value"] = rep.reference_value;
  j["solver"] = {{"tolerance", rep.solve_tol}};
  j["relaxation"] = "PPT_OUTER";
  j["library_version"] = kLibraryVersion;
  if (rep.seesaw_score > 0) j["seesaw_score"] = rep.seesaw_score;
  return j;
}

json min_info_report_to_json(const MinInfoReport& rep) {
  json j = envelope("report");
  j["report_type"] = "min_accessible_info";
  j["bits"] = rep.bits;
  j["witness_bits"] = rep.witness_bits;
  j["robn_value"] = rep.robn_value;
  j["quantum_guess"] = rep.quantum_guess;
  j["classical_guess"] = rep.classical_guess;
  j["hmin_xy"] = rep.hmin_xy;
  j["hmin_xy_given_g"] = rep.hmin_xy_given_g;
  j["relaxation"] = "PPT_OUTER";
  j["library_version"] = kLibraryVersion;
  return j;
}

json read_document(const std::string& path, const std::string& expected_kind) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  const auto& ver = field(doc, "schema_version", path);
  if (!ver.is_string() || ver.get<std::string>() != kSchemaVersion)
    throw InputError(path + ": unrecognized schema_version");
  const auto& kind = field(doc, "kind", path);
  if (!expected_kind.empty() && kind.get<std::string>() != expected_kind)
    throw InputError(path + ": expected kind '" + expected_kind + "', found '" +
                     kind.get<std::string>() + "'");
  return doc;
}

std::string dump_document(const json& doc) { return doc.dump(2) + "\n"; }

void write_document(const std::string& path, const json& doc) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp);
    out << dump_document(doc);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw InputError("cannot move " + tmp + " into place");
}

}  // namespace nlf::io
