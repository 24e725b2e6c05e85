#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "nlf/linalg.hpp"

// Quantum-information object layer: POVMs, states, distributed measurements,
// teleportation instruments, simulation subroutines, behaviours.
//
// Party ordering conventions, fixed globally:
//   measurement construction   (A, A', B', B)
//   Choi construction          (V, A, A', B')
// Every operation below documents which factors it traces out.

namespace nlf {

/// Deterministic random stream (own gaussian so that byte-identical output
/// does not depend on the standard library implementation).
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }
  double gauss();
  Complex cgauss() { return Complex(gauss(), gauss()); }
  uint64_t bits() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

class Povm {
 public:
  explicit Povm(std::vector<HermitianOperator> elements);
  const std::vector<HermitianOperator>& elements() const { return elements_; }
  const HermitianOperator& element(int a) const { return elements_.at(a); }
  int outcomes() const { return static_cast<int>(elements_.size()); }
  const std::vector<int>& dims() const { return elements_.front().dims(); }

 private:
  std::vector<HermitianOperator> elements_;
};

class BipartiteState {
 public:
  explicit BipartiteState(HermitianOperator op);
  const HermitianOperator& op() const { return op_; }
  int dim_a() const { return op_.dims()[0]; }
  int dim_b() const { return op_.dims()[1]; }

 private:
  HermitianOperator op_;
};

/// Convex mixture sum_l p(l) rho_l^A (x) rho_l^B given by its terms.
class SeparableModel {
 public:
  SeparableModel(std::vector<double> weights, std::vector<HermitianOperator> local_a,
                 std::vector<HermitianOperator> local_b);
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<HermitianOperator>& local_a() const { return local_a_; }
  const std::vector<HermitianOperator>& local_b() const { return local_b_; }
  int terms() const { return static_cast<int>(weights_.size()); }
  BipartiteState assemble() const;

 private:
  std::vector<double> weights_;
  std::vector<HermitianOperator> local_a_, local_b_;
};

struct Provenance {
  Povm alice;
  Povm bob;
  BipartiteState state;
};

/// Outcome-indexed family {M_ab} on A (x) B; a-major element order.
class DistributedMeasurement {
 public:
  DistributedMeasurement(int outcomes_a, int outcomes_b, std::vector<HermitianOperator> elements,
                         std::optional<Provenance> provenance = std::nullopt);
  int outcomes_a() const { return oa_; }
  int outcomes_b() const { return ob_; }
  const HermitianOperator& element(int a, int b) const { return elements_[a * ob_ + b]; }
  const std::vector<HermitianOperator>& elements() const { return elements_; }
  const std::vector<int>& dims() const { return elements_.front().dims(); }
  int dim_a() const { return dims()[0]; }
  int dim_b() const { return dims()[1]; }
  bool has_provenance() const { return provenance_.has_value(); }
  const Provenance& provenance() const { return *provenance_; }

  /// Largest violation of the no-signalling marginal structure
  /// sum_a M_ab = 1 (x) M_b, sum_b M_ab = M_a (x) 1.
  double no_signalling_residual() const;

 private:
  int oa_, ob_;
  std::vector<HermitianOperator> elements_;
  std::optional<Provenance> provenance_;
};

/// Choi operators J_a on V (x) B' of the subchannels of a teleportation
/// instrument; sum_a J_a = (1/d_V) 1 (x) rho_B'.
class TeleportationInstrument {
 public:
  explicit TeleportationInstrument(std::vector<HermitianOperator> choi,
                                   std::optional<std::pair<Povm, BipartiteState>> provenance = std::nullopt);
  int outcomes() const { return static_cast<int>(choi_.size()); }
  const HermitianOperator& choi(int a) const { return choi_.at(a); }
  const std::vector<HermitianOperator>& choi() const { return choi_; }
  int dim_v() const { return choi_.front().dims()[0]; }
  int dim_out() const { return choi_.front().dims()[1]; }

  /// Subchannel application Lambda_a[omega] = d_V tr_V[(omega^T (x) 1) J_a].
  HermitianOperator apply(int a, const HermitianOperator& omega) const;
  /// (Lambda_a (x) id)[sigma] for bipartite sigma on V (x) B.
  HermitianOperator apply_to_first(int a, const HermitianOperator& sigma) const;

 private:
  std::vector<HermitianOperator> choi_;
  std::optional<std::pair<Povm, BipartiteState>> provenance_;
};

/// LOSR simulation subroutine {p(l), p(a|i,l), p(b|j,l), E_l, N_l}.
class SimulationSubroutine {
 public:
  SimulationSubroutine(std::vector<double> weights, std::vector<Eigen::MatrixXd> post_alice,
                       std::vector<Eigen::MatrixXd> post_bob,
                       std::vector<LinearMapOnOperators> pre_alice,
                       std::vector<LinearMapOnOperators> pre_bob);
  static SimulationSubroutine trivial(int outcomes_a, int outcomes_b, std::vector<int> dims_a,
                                      std::vector<int> dims_b);
  /// Subroutine equivalent to applying `first`, then `second`.
  static SimulationSubroutine compose(const SimulationSubroutine& first,
                                      const SimulationSubroutine& second);

  int terms() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  const Eigen::MatrixXd& post_alice(int l) const { return post_alice_.at(l); }
  const Eigen::MatrixXd& post_bob(int l) const { return post_bob_.at(l); }
  const LinearMapOnOperators& pre_alice(int l) const { return pre_alice_.at(l); }
  const LinearMapOnOperators& pre_bob(int l) const { return pre_bob_.at(l); }

 private:
  std::vector<double> weights_;
  std::vector<Eigen::MatrixXd> post_alice_, post_bob_;
  std::vector<LinearMapOnOperators> pre_alice_, pre_bob_;
};

/// Conditional table p(a,b|x,y).
class Behaviour {
 public:
  Behaviour(int outcomes_a, int outcomes_b, int questions_x, int questions_y,
            std::vector<double> table);
  double p(int a, int b, int x, int y) const {
    return table_[((x * ny_ + y) * oa_ + a) * ob_ + b];
  }
  int outcomes_a() const { return oa_; }
  int outcomes_b() const { return ob_; }
  int questions_x() const { return nx_; }
  int questions_y() const { return ny_; }

 private:
  int oa_, ob_, nx_, ny_;
  std::vector<double> table_;
};

class QuestionSet {
 public:
  explicit QuestionSet(std::vector<HermitianOperator> states);
  const std::vector<HermitianOperator>& states() const { return states_; }
  int count() const { return static_cast<int>(states_.size()); }

 private:
  std::vector<HermitianOperator> states_;
};

// ---- constructions ----

/// M_ab = tr_{A'B'}[(M_a (x) M_b)(1^A (x) rho (x) 1^B)] in the global
/// (A, A', B', B) order; traces out A' and B'.
DistributedMeasurement build_distributed(const Povm& alice, const Povm& bob,
                                         const BipartiteState& rho);

/// Classical scheme sum_l p(l) M_{a|l}^A (x) M_{b|l}^B; every element is PPT
/// by construction.
DistributedMeasurement build_free_distributed(const Povm& alice, const Povm& bob,
                                              const SeparableModel& sep);

enum class Side { Alice, Bob };

/// Controlled measurement: sum_x |x><x| (x) M_{a|x} (Alice side) or
/// sum_y M_{b|y} (x) |y><y| (Bob side).
Povm controlled_povm(const std::vector<Povm>& settings, Side side);

/// p(a,b|x,y) = tr[M_ab (omega_x (x) omega_y)].
Behaviour behaviour(const DistributedMeasurement& m, const QuestionSet& qa, const QuestionSet& qb);

/// LOSR simulation of a measurement by a subroutine:
/// M'_ab = sum_{i,j,l} p(l) p(a|i,l) p(b|j,l) (E_l^adj (x) N_l^adj)[M_ij].
DistributedMeasurement simulate(const DistributedMeasurement& m, const SimulationSubroutine& s);

/// J_a = tr_{AA'}[(1^V (x) M_a (x) 1^{B'})(phi+^{VA} (x) rho^{A'B'})] in the
/// global (V, A, A', B') order; traces out A and A'.
TeleportationInstrument teleportation_instrument(const Povm& alice, const BipartiteState& rho);

/// The d^2 generalized Bell-basis projectors (1 (x) U_b) phi+ (1 (x) U_b)^dag.
Povm bell_measurement(int d);

/// p phi+ + (1-p) 1/d^2 on d (x) d.
BipartiteState isotropic_state(int d, double p);

// ---- seeded random instances (Ginibre states, Haar POVMs; versioned) ----

BipartiteState random_state(const std::vector<int>& dims, int rank, uint64_t seed);
Povm random_povm(const std::vector<int>& dims, int outcomes, uint64_t seed);
Matrix random_unitary(int d, Rng& rng);
SeparableModel random_separable(const std::vector<int>& dims, int terms, uint64_t seed);
SimulationSubroutine random_subroutine(int outcomes_a, int outcomes_b, const std::vector<int>& dims_a,
                                       const std::vector<int>& dims_b, int n_lambda, uint64_t seed);
/// Subroutine with identity pre-processing: shared randomness and stochastic
/// outcome relabelings only. This is the family whose action the
/// relabeling-search score of dsd_quantum_score dominates exactly.
SimulationSubroutine random_post_subroutine(int outcomes_a, int outcomes_b,
                                            const std::vector<int>& dims_a,
                                            const std::vector<int>& dims_b, int n_lambda,
                                            uint64_t seed);

}  // namespace nlf
