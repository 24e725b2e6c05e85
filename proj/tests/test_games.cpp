#include "doctest.h"

#include <sstream>

#include "nlf/games.hpp"
#include "oracles.hpp"

using namespace nlf;

namespace {

HermitianOperator basis_state(int x, int y) {
  Matrix m = Matrix::Zero(4, 4);
  m(x * 2 + y, x * 2 + y) = 1.0;
  return HermitianOperator({2, 2}, m);
}

StateEnsemble orthogonal_product_ensemble() {
  std::vector<double> probs(4, 0.25);
  std::vector<HermitianOperator> states;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) states.push_back(basis_state(x, y));
  return StateEnsemble(2, 2, std::move(probs), std::move(states));
}

// Alice's question register is the first factor of (A, A'); Bob's is the
// second factor of (B', B).
Povm z_basis_local() {
  Matrix z0 = Matrix::Zero(2, 2), z1 = Matrix::Zero(2, 2);
  z0(0, 0) = 1;
  z1(1, 1) = 1;
  return Povm({tensor(HermitianOperator({2}, z0), HermitianOperator::identity({2})),
               tensor(HermitianOperator({2}, z1), HermitianOperator::identity({2}))});
}

Povm z_basis_local_bob() {
  Matrix z0 = Matrix::Zero(2, 2), z1 = Matrix::Zero(2, 2);
  z0(0, 0) = 1;
  z1(1, 1) = 1;
  return Povm({tensor(HermitianOperator::identity({2}), HermitianOperator({2}, z0)),
               tensor(HermitianOperator::identity({2}), HermitianOperator({2}, z1))});
}

DistributedMeasurement perfect_free_discriminator() {
  return build_free_distributed(z_basis_local(), z_basis_local_bob(), random_separable({2, 2}, 1, 1));
}

}  // namespace

TEST_CASE("optimal_dsd_ensemble: uniform, point-mass, degenerate") {
  std::vector<HermitianOperator> unif(4, HermitianOperator::identity({2, 2}));
  auto e1 = optimal_dsd_ensemble(unif, 2, 2);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      CHECK(e1.prob(x, y) == doctest::Approx(0.25));
      CHECK((e1.state(x, y).matrix() - Matrix::Identity(4, 4) / 4).cwiseAbs().maxCoeff() < 1e-12);
    }

  std::vector<HermitianOperator> point(4, HermitianOperator::zero({2, 2}));
  point[3] = basis_state(1, 1);
  auto e2 = optimal_dsd_ensemble(point, 2, 2);
  CHECK(e2.prob(1, 1) == doctest::Approx(1.0));
  CHECK(e2.prob(0, 0) == doctest::Approx(0.0));
  CHECK((e2.state(1, 1) - basis_state(1, 1)).max_abs() < 1e-12);
  // Filler state for the zero-mass entries is maximally mixed.
  CHECK((e2.state(0, 0).matrix() - Matrix::Identity(4, 4) / 4).cwiseAbs().maxCoeff() < 1e-12);

  std::vector<HermitianOperator> zero(4, HermitianOperator::zero({2, 2}));
  CHECK_THROWS_AS(optimal_dsd_ensemble(zero, 2, 2), InputError);
}

TEST_CASE("dsd_classical_score: orthogonal products and single-state ensembles") {
  CHECK(dsd_classical_score(orthogonal_product_ensemble()) == doctest::Approx(1.0).epsilon(1e-6));

  std::vector<double> one = {1.0};
  std::vector<HermitianOperator> st = {HermitianOperator({2, 2}, oracle::random_density(4, 501))};
  CHECK(dsd_classical_score(StateEnsemble(1, 1, one, st)) == doctest::Approx(1.0).epsilon(1e-6));

  // Never below the best constant guess.
  auto bellm = build_distributed(bell_measurement(2), bell_measurement(2),
                                 BipartiteState(max_entangled(2)));
  auto ens = optimal_dsd_ensemble(robn(bellm).certificate, 4, 4);
  double maxp = 0;
  for (double p : ens.probs()) maxp = std::max(maxp, p);
  CHECK(dsd_classical_score(ens) >= maxp - 1e-7);
}

TEST_CASE("dsd_quantum_score: perfect free, uninformative, cardinality error") {
  auto g = orthogonal_product_ensemble();
  CHECK(dsd_quantum_score(g, perfect_free_discriminator()) == doctest::Approx(1.0).epsilon(1e-10));

  std::vector<HermitianOperator> unif(4, 0.25 * HermitianOperator::identity({2, 2}));
  DistributedMeasurement mu(2, 2, unif);
  // Best constant guess on a non-uniform ensemble.
  std::vector<double> probs = {0.4, 0.3, 0.2, 0.1};
  std::vector<HermitianOperator> states;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) states.push_back(basis_state(x, y));
  StateEnsemble skew(2, 2, probs, states);
  CHECK(dsd_quantum_score(skew, mu) == doctest::Approx(0.4).epsilon(1e-10));

  // More questions than outcomes on a side is rejected.
  std::vector<double> probs3(3 * 1, 1.0 / 3);
  std::vector<HermitianOperator> states3(3, basis_state(0, 0));
  StateEnsemble wide(3, 1, probs3, states3);
  CHECK_THROWS_AS(dsd_quantum_score(wide, mu), InputError);
}

TEST_CASE("verify_result1: free ratio 1, Bell/phi+ ratio 2") {
  auto free_m = build_free_distributed(random_povm({2, 2}, 2, 511), random_povm({2, 2}, 2, 512),
                                       random_separable({2, 2}, 2, 513));
  auto rep0 = verify_result1(free_m);
  CHECK(rep0.ratio == doctest::Approx(1.0).epsilon(1e-5));

  auto m = build_distributed(bell_measurement(2), bell_measurement(2),
                             BipartiteState(max_entangled(2)));
  auto rep = verify_result1(m);
  CHECK(rep.ratio == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(rep.reference_value == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("tsd_scores: classical transmitter, discarding instrument, ideal ratio") {
  auto g = orthogonal_product_ensemble();

  // Classical instrument that reads off x and lets Bob read y directly.
  auto klass = teleportation_instrument(z_basis_local(),
                                        BipartiteState(0.25 * HermitianOperator::identity({2, 2})));
  auto rep = tsd_scores(g, klass);
  CHECK(rep.quantum_score == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.classical_score == doctest::Approx(1.0).epsilon(1e-6));

  // Instrument that discards its input: only y can be guessed.
  std::vector<HermitianOperator> half = {0.5 * HermitianOperator::identity({2, 2}),
                                         0.5 * HermitianOperator::identity({2, 2})};
  auto discard = teleportation_instrument(Povm(half),
                                          BipartiteState(0.25 * HermitianOperator::identity({2, 2})));
  auto rep2 = tsd_scores(g, discard);
  CHECK(rep2.quantum_score == doctest::Approx(0.5).epsilon(1e-6));

  // Ideal teleportation on the certificate ensemble of its induced
  // distributed measurement: ratio 1 + RoT.
  auto ideal = teleportation_instrument(bell_measurement(2), BipartiteState(max_entangled(2)));
  auto m = build_distributed(bell_measurement(2), bell_measurement(2),
                             BipartiteState(max_entangled(2)));
  auto ens = optimal_dsd_ensemble(robn(m));
  auto rot_rep = rot(ideal);
  auto rep3 = tsd_scores(ens, ideal);
  CHECK(rep3.ratio == doctest::Approx(1.0 + rot_rep.value).epsilon(1e-4));
}

TEST_CASE("esd_scores: separable baseline and phi+ advantage") {
  auto sep = random_separable({2, 2}, 2, 521).assemble();
  auto ens = orthogonal_product_ensemble();
  auto rep = esd_scores(ens, sep);
  CHECK(rep.ratio <= 1.0 + 1e-6);

  BipartiteState phi(max_entangled(2));
  auto m = build_distributed(bell_measurement(2), bell_measurement(2), phi);
  auto cert_ens = optimal_dsd_ensemble(robn(m));
  auto rep2 = esd_scores(cert_ens, phi);
  CHECK(rep2.ratio == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("game_value: constants, perfect discrimination, linearity, oracle") {
  auto ens = orthogonal_product_ensemble();
  std::vector<double> vone(2 * 2 * 2 * 2, 1.0);
  GameRules all_win(ens, 2, 2, vone);
  std::vector<double> table(16, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) table[((x * 2 + y) * 2 + x) * 2 + y] = 1.0;
  Behaviour perfect(2, 2, 2, 2, table);
  CHECK(game_value(all_win, perfect) == doctest::Approx(1.0));

  std::vector<double> vdelta(16, 0.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) vdelta[((a * 2 + b) * 2 + a) * 2 + b] = 1.0;
  GameRules delta(ens, 2, 2, vdelta);
  CHECK(game_value(delta, perfect) == doctest::Approx(1.0));

  // Random rules match the direct quadruple sum and are linear in V.
  oracle::Rng rng(531);
  std::vector<double> v1(16), v2(16), tab(16);
  for (auto* v : {&v1, &v2})
    for (double& x : *v) x = rng.uniform();
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      double row[4], s = 0;
      for (int k = 0; k < 4; ++k) {
        row[k] = rng.uniform();
        s += row[k];
      }
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) tab[((x * 2 + y) * 2 + a) * 2 + b] = row[a * 2 + b] / s;
    }
  Behaviour beh(2, 2, 2, 2, tab);
  double direct = 0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          direct += ens.prob(x, y) * beh.p(a, b, x, y) * v1[((a * 2 + b) * 2 + x) * 2 + y];
  CHECK(game_value(GameRules(ens, 2, 2, v1), beh) == doctest::Approx(direct).epsilon(1e-12));

  std::vector<double> vmix(16);
  for (int k = 0; k < 16; ++k) vmix[k] = 0.3 * v1[k] + 0.7 * v2[k];
  const double lhs = game_value(GameRules(ens, 2, 2, vmix), beh);
  const double rhs = 0.3 * game_value(GameRules(ens, 2, 2, v1), beh) +
                     0.7 * game_value(GameRules(ens, 2, 2, v2), beh);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("check_monotone: identity, discarding, random subroutines") {
  auto m = build_distributed(bell_measurement(2), bell_measurement(2),
                             BipartiteState(max_entangled(2)));
  std::vector<StateEnsemble> ensembles;
  ensembles.push_back(optimal_dsd_ensemble(robn(m)));
  {
    std::vector<double> probs(16, 1.0 / 16);
    std::vector<HermitianOperator> states;
    for (int k = 0; k < 16; ++k)
      states.emplace_back(std::vector<int>{2, 2}, oracle::random_density(4, 600 + k));
    ensembles.emplace_back(4, 4, probs, states);
  }

  auto id_rep = check_monotone(m, SimulationSubroutine::trivial(4, 4, {2}, {2}), ensembles);
  CHECK(id_rep.passed);
  CHECK(id_rep.worst_increase <= 1e-12);

  // Discard everything: all outcomes post-processed to (0, 0).
  Eigen::MatrixXd to_first = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) to_first(0, i) = 1.0;
  SimulationSubroutine discard({1.0}, {to_first}, {to_first},
                               {LinearMapOnOperators::identity({2})},
                               {LinearMapOnOperators::identity({2})});
  auto d_rep = check_monotone(m, discard, ensembles);
  CHECK(d_rep.passed);
  auto sim = simulate(m, discard);
  double maxp = 0;
  for (double p : ensembles[0].probs()) maxp = std::max(maxp, p);
  CHECK(dsd_quantum_score(ensembles[0], sim) == doctest::Approx(maxp).epsilon(1e-9));

  for (uint64_t seed : {601, 602, 603}) {
    auto s = random_subroutine(4, 4, {2}, {2}, 2, seed);
    CHECK(check_monotone(m, s, ensembles).passed);
  }
}

TEST_CASE("min_entropy and conditional min_entropy") {
  CHECK(min_entropy({0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0));
  CHECK(min_entropy({0.0, 1.0, 0.0}) == doctest::Approx(0.0));
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(2, 2);
  joint(0, 0) = joint(1, 1) = 0.5;
  CHECK(cond_min_entropy(joint) == doctest::Approx(0.0));
  CHECK_THROWS_AS(min_entropy({0.5, 0.2}), InputError);
  CHECK_THROWS_AS(cond_min_entropy(Eigen::MatrixXd::Constant(2, 2, 0.3)), InputError);
}

TEST_CASE("min_accessible_info: free and Bell/phi+ fixtures") {
  auto free_m = build_free_distributed(random_povm({2, 2}, 2, 541), random_povm({2, 2}, 2, 542),
                                       random_separable({2, 2}, 2, 543));
  auto rep0 = min_accessible_info(free_m);
  CHECK(rep0.bits <= 1e-4);
  CHECK(std::abs(rep0.witness_bits - rep0.bits) <= 1e-4);

  auto m = build_distributed(bell_measurement(2), bell_measurement(2),
                             BipartiteState(max_entangled(2)));
  auto rep = min_accessible_info(m);
  CHECK(rep.bits == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(rep.witness_bits == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(rep.quantum_guess > rep.classical_guess);
  // The literal identity-decoding entropies of the witness are reported.
  CHECK(rep.hmin_xy >= rep.hmin_xy_given_g - 1e-12);
}
