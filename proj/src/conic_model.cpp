#include <algorithm>
#include <fstream>
#include <sstream>

#include "nlf/conic.hpp"

namespace nlf::conic {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "OPTIMAL";
    case SolveStatus::Infeasible: return "INFEASIBLE";
    case SolveStatus::Unbounded: return "UNBOUNDED";
    case SolveStatus::NumericalFailure: return "NUMERICAL_FAILURE";
  }
  return "UNKNOWN";
}

MapStep MapStep::scaled(double s) {
  MapStep m;
  m.kind = Kind::Scale;
  m.scale = s;
  return m;
}

MapStep MapStep::ptrace(std::vector<int> keep) {
  MapStep m;
  m.kind = Kind::PartialTrace;
  m.keep = std::move(keep);
  return m;
}

MapStep MapStep::ptranspose(int subsystem) {
  MapStep m;
  m.kind = Kind::PartialTranspose;
  m.subsystem = subsystem;
  return m;
}

MapStep MapStep::insert_ids(std::vector<int> full_dims, std::vector<int> positions) {
  MapStep m;
  m.kind = Kind::InsertIdentities;
  m.full_dims = std::move(full_dims);
  m.positions = std::move(positions);
  return m;
}

MapStep MapStep::embed_scalar(HermitianOperator coeff) {
  MapStep m;
  m.kind = Kind::EmbedScalar;
  m.coefficient = std::move(coeff);
  return m;
}

MapStep MapStep::extract_scalar(HermitianOperator coeff) {
  MapStep m;
  m.kind = Kind::ExtractScalar;
  m.coefficient = std::move(coeff);
  return m;
}

HermitianOperator MapStep::apply(const HermitianOperator& x) const {
  switch (kind) {
    case Kind::Scale:
      return scale * x;
    case Kind::PartialTrace:
      return partial_trace(x, keep);
    case Kind::PartialTranspose:
      return partial_transpose(x, subsystem);
    case Kind::InsertIdentities:
      return insert_identities(x, full_dims, positions);
    case Kind::EmbedScalar: {
      if (x.dim() != 1) throw InputError("EmbedScalar applied to non-scalar block");
      return x.matrix()(0, 0).real() * (*coefficient);
    }
    case Kind::ExtractScalar: {
      const double v = (coefficient->matrix().adjoint() * x.matrix()).trace().real();
      return HermitianOperator::scalar(v);
    }
  }
  throw std::logic_error("unreachable");
}

MapStep MapStep::adjoint(const std::vector<int>& in_dims) const {
  switch (kind) {
    case Kind::Scale:
      return scaled(scale);
    case Kind::PartialTrace: {
      // <tr_T(x), y> = <x, insert(y)>: adjoint embeds y back at the kept slots.
      return insert_ids(in_dims, keep);
    }
    case Kind::PartialTranspose:
      return ptranspose(subsystem);
    case Kind::InsertIdentities:
      return ptrace(positions);
    case Kind::EmbedScalar:
      return extract_scalar(*coefficient);
    case Kind::ExtractScalar:
      return embed_scalar(*coefficient);
  }
  throw std::logic_error("unreachable");
}

std::vector<int> MapStep::output_dims(const std::vector<int>& in_dims) const {
  switch (kind) {
    case Kind::Scale:
    case Kind::PartialTranspose:
      return in_dims;
    case Kind::PartialTrace: {
      if (keep.empty()) return {1};
      std::vector<int> out;
      for (int k : keep) {
        if (k < 0 || k >= static_cast<int>(in_dims.size()))
          throw InputError("PartialTrace: keep index out of range");
        out.push_back(in_dims[k]);
      }
      return out;
    }
    case Kind::InsertIdentities:
      return full_dims;
    case Kind::EmbedScalar:
      return coefficient->dims();
    case Kind::ExtractScalar:
      return {1};
  }
  throw std::logic_error("unreachable");
}

void ConeProgram::add_variable(Variable v) {
  if (index_.count(v.name)) throw InputError("duplicate variable " + v.name);
  if (v.cone == Cone::PsdAndPpt &&
      (v.ppt_subsystem < 0 || v.ppt_subsystem >= static_cast<int>(v.dims.size())))
    throw InputError("PsdAndPpt variable " + v.name + ": invalid subsystem");
  index_[v.name] = static_cast<int>(vars_.size());
  vars_.push_back(std::move(v));
}

void ConeProgram::add_free(const std::string& name, std::vector<int> dims) {
  add_variable({name, std::move(dims), Cone::Free, -1});
}

void ConeProgram::add_psd(const std::string& name, std::vector<int> dims) {
  add_variable({name, std::move(dims), Cone::Psd, -1});
}

void ConeProgram::add_psd_and_ppt(const std::string& name, std::vector<int> dims, int ppt_subsystem) {
  add_variable({name, std::move(dims), Cone::PsdAndPpt, ppt_subsystem});
}

const Variable& ConeProgram::variable(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw InputError("unknown variable " + name);
  return vars_[it->second];
}

bool ConeProgram::has_variable(const std::string& name) const { return index_.count(name) > 0; }

void ConeProgram::add_equality(const std::string& name, std::vector<Term> terms, HermitianOperator rhs) {
  for (const auto& t : terms) {
    const Variable& v = variable(t.var);
    std::vector<int> dims = v.dims;
    for (const auto& step : t.chain) dims = step.output_dims(dims);
    if (product_of_dims(dims) != rhs.dim()) {
      std::ostringstream os;
      os << "constraint " << name << ": term on " << t.var << " maps to dimension "
         << product_of_dims(dims) << " but rhs has " << rhs.dim();
      throw InputError(os.str());
    }
  }
  eqs_.push_back({name, std::move(terms), std::move(rhs)});
}

void ConeProgram::set_objective(Objective obj) {
  for (const auto& [name, w] : obj.weights) {
    const Variable& v = variable(name);
    if (w.dim() != product_of_dims(v.dims)) throw InputError("objective weight dims mismatch for " + name);
  }
  obj_ = std::move(obj);
}

HermitianOperator ConeProgram::eval_constraint(const Constraint& c,
                                               const std::map<std::string, HermitianOperator>& point) const {
  HermitianOperator acc = HermitianOperator::zero(c.rhs.dims());
  for (const auto& t : c.terms) {
    auto it = point.find(t.var);
    if (it == point.end()) throw InputError("eval_constraint: missing value for " + t.var);
    HermitianOperator x = it->second;
    for (const auto& step : t.chain) x = step.apply(x);
    // Result dims may be a different factorization of the same total space.
    acc += HermitianOperator(c.rhs.dims(), t.coeff * x.matrix());
  }
  return acc;
}

double ConeProgram::eval_objective(const std::map<std::string, HermitianOperator>& point) const {
  double v = obj_.constant;
  for (const auto& [name, w] : obj_.weights) {
    auto it = point.find(name);
    if (it == point.end()) throw InputError("eval_objective: missing value for " + name);
    v += (w.matrix().adjoint() * it->second.matrix()).trace().real();
  }
  return v;
}

namespace {

void dump_matrix(std::ostream& os, const Matrix& m) {
  os << "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << (r ? "," : "") << "[";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      os << (c ? "," : "") << "[" << m(r, c).real() << "," << m(r, c).imag() << "]";
    }
    os << "]";
  }
  os << "]";
}

}  // namespace

void ConeProgram::dump_debug(const std::string& path) const {
  std::ofstream os(path);
  os.precision(17);
  os << "{\n  \"variables\": [\n";
  for (size_t i = 0; i < vars_.size(); ++i) {
    const auto& v = vars_[i];
    os << "    {\"name\": \"" << v.name << "\", \"dims\": [";
    for (size_t j = 0; j < v.dims.size(); ++j) os << (j ? "," : "") << v.dims[j];
    os << "], \"cone\": \""
       << (v.cone == Cone::Free ? "FREE" : v.cone == Cone::Psd ? "PSD" : "PSD_AND_PPT") << "\"";
    if (v.cone == Cone::PsdAndPpt) os << ", \"ppt_subsystem\": " << v.ppt_subsystem;
    os << "}" << (i + 1 < vars_.size() ? "," : "") << "\n";
  }
  os << "  ],\n  \"equalities\": [\n";
  for (size_t i = 0; i < eqs_.size(); ++i) {
    const auto& e = eqs_[i];
    os << "    {\"name\": \"" << e.name << "\", \"terms\": [";
    for (size_t t = 0; t < e.terms.size(); ++t) {
      os << (t ? "," : "") << "{\"var\": \"" << e.terms[t].var << "\", \"coeff\": " << e.terms[t].coeff
         << ", \"steps\": " << e.terms[t].chain.size() << "}";
    }
    os << "], \"rhs\": ";
    dump_matrix(os, e.rhs.matrix());
    os << "}" << (i + 1 < eqs_.size() ? "," : "") << "\n";
  }
  os << "  ],\n  \"objective\": {\"sense\": \""
     << (obj_.sense == Sense::Minimize ? "min" : "max") << "\", \"constant\": " << obj_.constant
     << ", \"weights\": [\n";
  for (size_t i = 0; i < obj_.weights.size(); ++i) {
    os << "    {\"var\": \"" << obj_.weights[i].first << "\", \"weight\": ";
    dump_matrix(os, obj_.weights[i].second.matrix());
    os << "}" << (i + 1 < obj_.weights.size() ? "," : "") << "\n";
  }
  os << "  ]}\n}\n";
}

ConeProgram dualize(const ConeProgram& p) {
  // Normalize to a minimization; for Maximize we dualize -objective and flip
  // the emitted dual back to Maximize-with-negated weights semantics.
  const bool maximize = p.objective().sense == Sense::Maximize;
  const double sgn = maximize ? -1.0 : 1.0;

  ConeProgram d;
  Objective dobj;
  dobj.sense = maximize ? Sense::Minimize : Sense::Maximize;
  dobj.constant = p.objective().constant;

  for (const auto& e : p.equalities()) {
    d.add_free("Y:" + e.name, e.rhs.dims());
    dobj.weights.push_back({"Y:" + e.name, sgn * e.rhs});
  }

  // One dual constraint per primal variable: sum_i L_i^adj(Y_i) + Z_v = C_v.
  for (const auto& v : p.variables()) {
    HermitianOperator c_v = HermitianOperator::zero(v.dims);
    for (const auto& [name, w] : p.objective().weights) {
      if (name == v.name) c_v += HermitianOperator(v.dims, sgn * w.matrix());
    }
    std::vector<Term> terms;
    for (const auto& e : p.equalities()) {
      for (const auto& t : e.terms) {
        if (t.var != v.name) continue;
        // Adjoint chain applied to Y, reversed order.
        std::vector<MapStep> fwd_chain = t.chain;
        std::vector<std::vector<int>> in_dims_stack;
        std::vector<int> cur = v.dims;
        for (const auto& step : fwd_chain) {
          in_dims_stack.push_back(cur);
          cur = step.output_dims(cur);
        }
        std::vector<MapStep> adj_chain;
        for (int i = static_cast<int>(fwd_chain.size()) - 1; i >= 0; --i)
          adj_chain.push_back(fwd_chain[i].adjoint(in_dims_stack[i]));
        terms.push_back({"Y:" + e.name, t.coeff, std::move(adj_chain)});
      }
    }
    switch (v.cone) {
      case Cone::Free:
        break;
      case Cone::Psd:
        d.add_psd("Z:" + v.name, v.dims);
        terms.push_back({"Z:" + v.name, 1.0, {}});
        break;
      case Cone::PsdAndPpt:
        // Dual cone of PSD intersect PPT: {P + Q^(T_sub) : P, Q >= 0}.
        d.add_psd("Z:" + v.name, v.dims);
        d.add_psd("Zppt:" + v.name, v.dims);
        terms.push_back({"Z:" + v.name, 1.0, {}});
        terms.push_back({"Zppt:" + v.name, 1.0, {MapStep::ptranspose(v.ppt_subsystem)}});
        break;
    }
    d.add_equality("dual:" + v.name, std::move(terms), c_v);
  }
  if (maximize) {
    // Emitted program is min sum <-B, Y> + k over the same feasible set; the
    // user-facing sense stays Minimize with the sign already folded in.
    dobj.sense = Sense::Minimize;
  }
  d.set_objective(std::move(dobj));
  return d;
}

bool ResidualReport::within(double tol) const {
  return max_equality_residual <= 10 * tol && min_cone_eigenvalue >= -10 * tol &&
         duality_gap <= 10 * tol && max_complementarity <= 10 * tol;
}

std::string ResidualReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"max_equality_residual\": " << max_equality_residual
     << ", \"min_cone_eigenvalue\": " << min_cone_eigenvalue << ", \"duality_gap\": " << duality_gap
     << ", \"max_complementarity\": " << max_complementarity << "}";
  return os.str();
}

ResidualReport verify_solution(const ConeProgram& p, const Solution& s, double /*tol*/) {
  ResidualReport r;
  for (const auto& e : p.equalities()) {
    HermitianOperator lhs = p.eval_constraint(e, s.primal);
    r.max_equality_residual = std::max(r.max_equality_residual, (lhs - e.rhs).max_abs());
  }
  r.min_cone_eigenvalue = 0.0;
  for (const auto& v : p.variables()) {
    if (v.cone == Cone::Free) continue;
    const auto& x = s.primal.at(v.name);
    r.min_cone_eigenvalue = std::min(r.min_cone_eigenvalue, min_eigenvalue(x));
    if (v.cone == Cone::PsdAndPpt)
      r.min_cone_eigenvalue =
          std::min(r.min_cone_eigenvalue, min_eigenvalue(partial_transpose(x, v.ppt_subsystem)));
    auto it = s.cone_duals.find(v.name);
    if (it != s.cone_duals.end()) {
      const double comp =
          std::abs((it->second.matrix().adjoint() * x.matrix()).trace().real());
      r.max_complementarity = std::max(r.max_complementarity, comp);
    }
  }
  r.duality_gap = std::abs(s.objective_value - s.dual_objective_value);
  return r;
}

Eigen::MatrixXd realify(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = x.real();
  r.topRightCorner(n, n) = -x.imag();
  r.bottomLeftCorner(n, n) = x.imag();
  r.bottomRightCorner(n, n) = x.real();
  return r;
}

Eigen::MatrixXd realify(const HermitianOperator& x) { return realify(x.matrix()); }

Matrix derealify(const Eigen::MatrixXd& r) {
  if (r.rows() % 2 != 0 || r.rows() != r.cols()) throw InputError("derealify: even square matrix required");
  const Eigen::Index n = r.rows() / 2;
  Matrix x(n, n);
  x.real() = (r.topLeftCorner(n, n) + r.bottomRightCorner(n, n)) / 2.0;
  x.imag() = (r.bottomLeftCorner(n, n) - r.topRightCorner(n, n)) / 2.0;
  return x;
}

Solution solve(const ConeProgram& p, double tol) {
  SolveOptions opts;
  opts.tol = tol;
  return solve(p, opts);
}

}  // namespace nlf::conic
