#pragma once

#include <map>
#include <string>

#include "nlf/conic.hpp"
#include "nlf/qobj.hpp"

// The three conic quantifiers over the PPT outer approximation of the
// separable cone: RoBN for distributed measurements, RoT for teleportation
// instruments, RoE for bipartite states. Each solve returns the primal
// decomposition witness and the dual certificate.
//
// Strict feasibility (documented Slater points): the primal programs admit
// interior points built from uniform noise, e.g. for RoBN take
// Ntilde_ab = (t/(oA oB)) 1 with t > 0 and Otilde_ab = M_ab + Ntilde_ab + d 1
// for d large enough that the partial transpose is positive; for RoT/RoE take
// sigma_tilde = c 1 with c large. The duals are strictly feasible at scaled
// identities, so strong duality holds for every instance solved here.

namespace nlf {

struct RobustnessReport {
  double value = 0.0;
  std::map<std::string, HermitianOperator> primal_witness;
  std::map<std::string, HermitianOperator> dual_certificate;
  // The A-block family in outcome-major order (one entry for RoE, o_A for
  // RoT, o_A*o_B for RoBN); feeds the discrimination-game layer.
  std::vector<HermitianOperator> certificate;
  int cert_outcomes_a = 1;
  int cert_outcomes_b = 1;
  double gap = 0.0;
  double certificate_residual = 0.0;  // |sum tr[A . measured] - 1 - value|
  std::string relaxation = "PPT_OUTER";
  conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
  double solve_tol = 0.0;
  int iterations = 0;
  double wall_seconds = 0.0;
};

/// Thrown when a solver run does not reach OPTIMAL; carries the report with
/// the best iterate attached.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(std::string what, RobustnessReport partial)
      : std::runtime_error(std::move(what)), report(std::move(partial)) {}
  RobustnessReport report;
};

RobustnessReport robn(const DistributedMeasurement& m, double tol = 1e-8);
RobustnessReport rot(const TeleportationInstrument& t, double tol = 1e-8);
RobustnessReport roe(const BipartiteState& rho, double tol = 1e-8);

/// The conic model robn() solves, for inspection and debug dumps.
conic::ConeProgram robn_program(const DistributedMeasurement& m);

struct RobnStateOptions {
  double tol = 1e-8;
  bool seesaw = false;  // exploratory refinement; Bell measurements are the
                        // proof-backed default
  int seesaw_rounds = 5;
};

struct RobnStateReport {
  RobustnessReport robn_report;
  double roe_value = 0.0;
  double disagreement = 0.0;
  bool consistent = true;
};

/// Thrown when the Bell-measurement RoBN of a state disagrees with its RoE
/// beyond tolerance; carries both values.
class RobnRoeMismatch : public std::runtime_error {
 public:
  RobnRoeMismatch(std::string what, RobnStateReport diag)
      : std::runtime_error(std::move(what)), report(std::move(diag)) {}
  RobnStateReport report;
};

RobnStateReport robn_of_state(const BipartiteState& rho, const RobnStateOptions& opts = {});

struct PropertyCheck {
  std::string name;
  bool passed = true;
  double worst_violation = 0.0;
  std::string counterexample;  // seeds and values of the worst instance
};

struct PropertySuiteReport {
  bool all_passed = true;
  std::vector<PropertyCheck> checks;
  double max_gap = 0.0;            // worst duality gap across all internal solves
  double max_cert_residual = 0.0;  // worst certificate-identity residual
};

struct PropertySuiteOptions {
  int faithfulness_instances = 10;
  int convexity_pairs = 20;
  int monotonicity_instances = 50;
  int local_dim = 2;
  int outcomes = 2;
  uint64_t seed = 1;
  double tol = 1e-8;
  double slack = 1e-6;  // allowed violation
};

/// Quantifier property battery: faithfulness on free constructions,
/// convexity on a 5-point mixing grid, monotonicity under random subroutines.
PropertySuiteReport property_suite(const PropertySuiteOptions& opts);

/// SDP over one local POVM maximizing sum_ab tr[W_ab M_ab] with the other
/// side and the shared state fixed; the see-saw half step.
Povm optimize_local_povm(const std::vector<HermitianOperator>& weight_blocks, int oa, int ob,
                         const Povm& alice, const Povm& bob, const BipartiteState& rho, Side side,
                         double tol);

}  // namespace nlf
