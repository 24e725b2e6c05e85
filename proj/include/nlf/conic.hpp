#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlf/linalg.hpp"

namespace nlf::conic {

enum class Cone { Free, Psd, PsdAndPpt };

struct Variable {
  std::string name;
  std::vector<int> dims;
  Cone cone = Cone::Free;
  int ppt_subsystem = -1;  // for PsdAndPpt
};

/// One primitive step of a linear operator map, applied left to right along a
/// term's chain. Adjoints: PartialTrace <-> InsertIdentities,
/// PartialTranspose and Scale are self-adjoint, EmbedScalar <-> ExtractScalar.
struct MapStep {
  enum class Kind {
    Scale,             // x -> scale * x
    PartialTrace,      // keep listed subsystems of in_dims
    PartialTranspose,  // transpose one factor
    InsertIdentities,  // embed into full_dims at positions
    EmbedScalar,       // 1x1 x -> x(0,0) * coefficient operator
    ExtractScalar,     // x -> [ <coefficient, x> ] (1x1)
  };
  Kind kind;
  double scale = 1.0;
  std::vector<int> keep;         // PartialTrace
  int subsystem = -1;            // PartialTranspose
  std::vector<int> full_dims;    // InsertIdentities
  std::vector<int> positions;    // InsertIdentities
  std::optional<HermitianOperator> coefficient;  // EmbedScalar / ExtractScalar

  static MapStep scaled(double s);
  static MapStep ptrace(std::vector<int> keep);
  static MapStep ptranspose(int subsystem);
  static MapStep insert_ids(std::vector<int> full_dims, std::vector<int> positions);
  static MapStep embed_scalar(HermitianOperator coeff);
  static MapStep extract_scalar(HermitianOperator coeff);

  HermitianOperator apply(const HermitianOperator& x) const;
  MapStep adjoint(const std::vector<int>& in_dims) const;
  std::vector<int> output_dims(const std::vector<int>& in_dims) const;
};

struct Term {
  std::string var;
  double coeff = 1.0;
  std::vector<MapStep> chain;  // may be empty (identity)
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  HermitianOperator rhs;
};

enum class Sense { Minimize, Maximize };

struct Objective {
  Sense sense = Sense::Minimize;
  // Real linear functional sum_v <weight_v, X_v> + constant.
  std::vector<std::pair<std::string, HermitianOperator>> weights;
  double constant = 0.0;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };
std::string to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::map<std::string, HermitianOperator> primal;
  std::map<std::string, HermitianOperator> equality_duals;  // multiplier per constraint
  std::map<std::string, HermitianOperator> cone_duals;      // dual slack per cone variable
  double objective_value = 0.0;       // user sense
  double dual_objective_value = 0.0;  // user sense
  double gap = 0.0;                   // |primal - dual|
  int iterations = 0;
  std::string message;
};

class ConeProgram {
 public:
  void add_variable(Variable v);
  void add_free(const std::string& name, std::vector<int> dims);
  void add_psd(const std::string& name, std::vector<int> dims);
  void add_psd_and_ppt(const std::string& name, std::vector<int> dims, int ppt_subsystem);

  /// terms must reference declared variables; lhs and rhs dims must agree.
  void add_equality(const std::string& name, std::vector<Term> terms, HermitianOperator rhs);
  void set_objective(Objective obj);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& equalities() const { return eqs_; }
  const Objective& objective() const { return obj_; }
  const Variable& variable(const std::string& name) const;
  bool has_variable(const std::string& name) const;

  /// Applies a constraint's left side to a primal assignment.
  HermitianOperator eval_constraint(const Constraint& c,
                                    const std::map<std::string, HermitianOperator>& point) const;
  double eval_objective(const std::map<std::string, HermitianOperator>& point) const;

  /// Structured text dump for offline inspection (same matrix encoding as the
  /// CLI file format).
  void dump_debug(const std::string& path) const;

 private:
  std::vector<Variable> vars_;
  std::map<std::string, int> index_;
  std::vector<Constraint> eqs_;
  Objective obj_;
};

struct SolveOptions {
  double tol = 1e-8;
  int max_iterations = 200;
  bool verbose = false;
};

/// Dense primal-dual path-following interior-point solve (homogeneous
/// self-dual embedding, Nesterov-Todd scaling). Deterministic.
Solution solve(const ConeProgram& p, const SolveOptions& opts);
Solution solve(const ConeProgram& p, double tol = 1e-8);

/// Mechanical Lagrangian dual. Constraint multipliers become free variables
/// named "Y:<constraint>"; cone slacks "Z:<var>" (and "Zppt:<var>" for the
/// decomposable part of a PSD+PPT dual cone).
ConeProgram dualize(const ConeProgram& p);

struct ResidualReport {
  double max_equality_residual = 0.0;
  double min_cone_eigenvalue = 0.0;  // most negative over all cone memberships
  double duality_gap = 0.0;
  double max_complementarity = 0.0;  // max |<Z_v, X_v>| over cone variables
  bool within(double tol) const;
  std::string to_json() const;
};

/// Independent recomputation of all residuals for an OPTIMAL solution.
ResidualReport verify_solution(const ConeProgram& p, const Solution& s, double tol);

/// Real-symmetric embedding [[Re x, -Im x], [Im x, Re x]]; spectrum of x doubled.
Eigen::MatrixXd realify(const Matrix& x);
Eigen::MatrixXd realify(const HermitianOperator& x);
Matrix derealify(const Eigen::MatrixXd& r);

}  // namespace nlf::conic
