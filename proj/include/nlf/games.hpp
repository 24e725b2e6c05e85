#pragma once

#include "nlf/robustness.hpp"

// Operational layer: distributed/teleportation/entanglement-assisted state
// discrimination scores, certificate-extracted game ensembles, the
// simulation-preorder monotone check, and single-shot information quantities.

namespace nlf {

/// Game ensemble G = {p(x,y), sigma_xy}; states are bipartite densities on
/// the measured pair, x-major storage.
class StateEnsemble {
 public:
  StateEnsemble(int nx, int ny, std::vector<double> probs, std::vector<HermitianOperator> states);
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double prob(int x, int y) const { return probs_[x * ny_ + y]; }
  const HermitianOperator& state(int x, int y) const { return states_[x * ny_ + y]; }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<HermitianOperator>& states() const { return states_; }
  const std::vector<int>& dims() const { return states_.front().dims(); }

 private:
  int nx_, ny_;
  std::vector<double> probs_;
  std::vector<HermitianOperator> states_;
};

/// Score function V(a,b,x,y) in [0,1] over outcome and question labels.
class GameRules {
 public:
  GameRules(StateEnsemble ensemble, int oa, int ob, std::vector<double> v);
  const StateEnsemble& ensemble() const { return ensemble_; }
  int outcomes_a() const { return oa_; }
  int outcomes_b() const { return ob_; }
  double v(int a, int b, int x, int y) const {
    return v_[((a * ob_ + b) * ensemble_.nx() + x) * ensemble_.ny() + y];
  }

 private:
  StateEnsemble ensemble_;
  int oa_, ob_;
  std::vector<double> v_;
};

struct ScoreReport {
  double quantum_score = 0.0;
  double classical_score = 0.0;
  double ratio = 0.0;
  std::string quantum_method;
  std::string classical_method;
  double reference_value = 0.0;  // the robustness value the ratio is checked against
  double solve_tol = 0.0;
  double classical_gap = 0.0;   // duality gap of the classical-score SDP
  double quantum_gap = 0.0;     // duality gap of the quantum-side SDP, if one ran
  double robn_gap = 0.0;        // duality gap of the underlying robustness solve
  double robn_cert_residual = 0.0;
  double seesaw_score = 0.0;  // 0 when no refinement ran
};

/// Thrown when an equality that a result guarantees fails beyond tolerance;
/// carries all intermediates.
class ResultCheckFailure : public std::runtime_error {
 public:
  ResultCheckFailure(std::string what, ScoreReport diag)
      : std::runtime_error(std::move(what)), report(std::move(diag)) {}
  ScoreReport report;
};

/// Discrimination-game ensemble certified by a RoBN dual solution:
/// p*(x,y) = tr A_xy / C, sigma*_xy = A_xy / tr A_xy, C = sum tr A_xy.
/// Zero-trace blocks become zero-probability entries with a maximally mixed
/// filler state.
StateEnsemble optimal_dsd_ensemble(const std::vector<HermitianOperator>& cert, int oa, int ob);
StateEnsemble optimal_dsd_ensemble(const RobustnessReport& robn_report);

/// Best average guessing probability over the relaxed free set (no-signalling
/// PSD+PPT measurement families); upper-bounds the true classical score.
double dsd_classical_score(const StateEnsemble& g, double tol = 1e-8, double* gap_out = nullptr);

/// Trivial-subroutine evaluation improved by exhaustive classical outcome
/// relabeling (deterministic local maps a -> x, b -> y); a certified lower
/// bound on the simulation supremum.
double dsd_quantum_score(const StateEnsemble& g, const DistributedMeasurement& m);

/// Runs robn, extracts the certificate ensemble, computes both scores, and
/// asserts ratio = 1 + RoBN within 1e-4.
ScoreReport verify_result1(const DistributedMeasurement& m, double tol = 1e-8);

/// Quantum score: SDP over Bob's POVM with the trivial subroutine on Alice's
/// outcome; classical score: the DSD baseline.
ScoreReport tsd_scores(const StateEnsemble& g, const TeleportationInstrument& t, double tol = 1e-8);

struct EsdOptions {
  double tol = 1e-8;
  bool seesaw = false;
  int seesaw_rounds = 50;
  double seesaw_min_step = 1e-7;
};

/// Quantum score evaluated with Bell measurements on both sides (the
/// proof-backed optimizer for certificate ensembles), optionally refined by
/// see-saw over one POVM at a time; classical score: the DSD baseline.
ScoreReport esd_scores(const StateEnsemble& g, const BipartiteState& rho, const EsdOptions& opts = {});

/// sum_xy p(x,y) p(a,b|x,y) V(a,b,x,y).
double game_value(const GameRules& rules, const Behaviour& behaviour);

struct MonotoneReport {
  bool passed = true;
  double worst_increase = 0.0;
  int worst_ensemble = -1;
  double score_before = 0.0;
  double score_after = 0.0;
};

/// Forward direction of the complete-monotone theorem: simulation never
/// increases any DSD score (both sides evaluated with the same
/// post-processing search).
MonotoneReport check_monotone(const DistributedMeasurement& m, const SimulationSubroutine& s,
                              const std::vector<StateEnsemble>& ensembles, double slack = 1e-6);

/// H_min(X) = -log2 max_x p(x); input must be normalized within 1e-10.
double min_entropy(const std::vector<double>& p);
/// H_min(X|G) = -log2 sum_g max_x p(x,g) for a joint table (rows x, cols g).
double cond_min_entropy(const Eigen::MatrixXd& joint);

struct MinInfoReport {
  double bits = 0.0;          // log2(1 + RoBN)
  double witness_bits = 0.0;  // guessing-probability gain of the witness
  double robn_value = 0.0;
  double quantum_guess = 0.0;    // p_guess on the certificate ensemble with m
  double classical_guess = 0.0;  // free-set SDP baseline on the same ensemble
  double robn_gap = 0.0;
  double robn_cert_residual = 0.0;
  double classical_gap = 0.0;
  // Literal single-shot entropies of the witness encoding under the identity
  // decoding, for reporting.
  double hmin_xy = 0.0;
  double hmin_xy_given_g = 0.0;
};

/// Min-accessible information of the measurement channel: log2(1 + RoBN),
/// with the witness encoding from the dual certificate and the identity
/// decoding; asserts the witness guessing-probability gain attains the value
/// within 1e-4.
MinInfoReport min_accessible_info(const DistributedMeasurement& m, double tol = 1e-8);

}  // namespace nlf
