#include "doctest.h"

#include <sstream>

#include "nlf/robustness.hpp"
#include "oracles.hpp"

using namespace nlf;

namespace {

BipartiteState theta_state(double theta) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(0) = std::cos(theta);
  v(3) = std::sin(theta);
  return BipartiteState(HermitianOperator({2, 2}, Matrix(v * v.adjoint())));
}

void check_duality(const RobustnessReport& rep) {
  CHECK(rep.status == conic::SolveStatus::Optimal);
  CHECK(rep.gap <= 1e-7);
  CHECK(rep.certificate_residual <= 1e-6);
  for (const auto& a : rep.certificate) CHECK(min_eigenvalue(a) >= -1e-7);
  CHECK(rep.value >= -1e-9);
  CHECK(rep.relaxation == "PPT_OUTER");
}

}  // namespace

TEST_CASE("roe: phi+ certified by an analytic primal-dual pair") {
  // Dual point A = 2 phi+ is feasible: 1 - A = Q^(T_B) with Q = 1 - SWAP >= 0,
  // value tr[A phi] - 1 = 1. Primal point sigma = phi + (1/3)(1 - phi) is
  // feasible with tr - 1 = 1. Weak duality pins RoE(phi+) = 1 exactly.
  auto phi = max_entangled(2);
  auto one = HermitianOperator::identity({2, 2});
  HermitianOperator a_wit = 2.0 * phi;
  HermitianOperator q_wit = partial_transpose(one - a_wit, 1);  // = 1 - SWAP
  CHECK(min_eigenvalue(q_wit) >= -1e-12);
  CHECK((a_wit.matrix() * phi.matrix()).trace().real() - 1.0 == doctest::Approx(1.0));

  HermitianOperator sigma = phi + (1.0 / 3.0) * (one - phi);
  CHECK(min_eigenvalue(sigma - phi) >= -1e-12);
  CHECK(min_eigenvalue(partial_transpose(sigma, 1)) >= -1e-12);
  CHECK(sigma.trace() - 1.0 == doctest::Approx(1.0));

  auto rep = roe(BipartiteState(phi), 1e-8);
  check_duality(rep);
  CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-6));
  const auto& a = rep.dual_certificate.at("A");
  CHECK(min_eigenvalue(a) >= -1e-7);
  HermitianOperator w = one - a;
  CHECK((w - rep.dual_certificate.at("W")).max_abs() < 1e-6);
  CHECK(min_eigenvalue(partial_transpose(rep.dual_certificate.at("W"), 1)) >= -1e-7);
}

TEST_CASE("roe: pure states match the Schmidt formula") {
  for (double theta : {M_PI / 16, M_PI / 8, M_PI / 4}) {
    auto rep = roe(theta_state(theta), 1e-8);
    check_duality(rep);
    CHECK(rep.value == doctest::Approx(std::sin(2 * theta)).epsilon(1e-5));
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    v(0) = std::cos(theta);
    v(3) = std::sin(theta);
    CHECK(rep.value == doctest::Approx(oracle::pure_state_robustness(v, 2, 2)).epsilon(1e-5));
  }
}

TEST_CASE("roe: separable states and the isotropic family") {
  for (uint64_t seed : {401, 402, 403}) {
    auto sep = random_separable({2, 2}, 3, seed);
    auto rep = roe(sep.assemble(), 1e-8);
    check_duality(rep);
    CHECK(rep.value <= 1e-6);
  }
  for (double p : {0.2, 0.5, 0.8, 1.0}) {
    auto rep = roe(isotropic_state(2, p), 1e-8);
    check_duality(rep);
    CHECK(rep.value == doctest::Approx(oracle::isotropic_robustness(p)).epsilon(1e-6));
  }
}

TEST_CASE("robn: faithfulness on a free construction") {
  auto m = build_free_distributed(random_povm({2, 2}, 2, 411), random_povm({2, 2}, 2, 412),
                                  random_separable({2, 2}, 2, 413));
  auto rep = robn(m, 1e-8);
  check_duality(rep);
  CHECK(rep.value <= 1e-6);
}

TEST_CASE("robn: Bell/Bell/phi+ equals RoE(phi+) = 1") {
  auto bell = bell_measurement(2);
  auto m = build_distributed(bell, bell, BipartiteState(max_entangled(2)));
  auto rep = robn(m, 1e-8);
  check_duality(rep);
  CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-5));

  // Certificate structure: C_a + B_b - A_ab = F_ab with every F_ab
  // of decomposable form (its partial transpose is PSD here since P = 0).
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      std::ostringstream ka, kb, kc, kf;
      ka << "A:" << a << ":" << b;
      kf << "F:" << a << ":" << b;
      kb << "B:" << b;
      kc << "C:" << a;
      auto lhs = rep.dual_certificate.at(kc.str()) + rep.dual_certificate.at(kb.str()) -
                 rep.dual_certificate.at(ka.str());
      CHECK((lhs - rep.dual_certificate.at(kf.str())).max_abs() < 1e-6);
      CHECK(min_eigenvalue(partial_transpose(rep.dual_certificate.at(kf.str()), 1)) >= -1e-7);
    }
  CHECK(rep.dual_certificate.at("D").trace() + rep.dual_certificate.at("E").trace() ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("robn: isotropic family matches roe (Result 4 instances)") {
  auto bell = bell_measurement(2);
  for (double p : {0.2, 0.6, 1.0}) {
    auto m = build_distributed(bell, bell, isotropic_state(2, p));
    auto rep = robn(m, 1e-8);
    check_duality(rep);
    CHECK(rep.value == doctest::Approx(oracle::isotropic_robustness(p)).epsilon(1e-5));
  }
}

TEST_CASE("rot: classical instruments score zero, ideal teleportation scores one") {
  auto sep = random_separable({2, 2}, 2, 421);
  auto tc = teleportation_instrument(random_povm({2, 2}, 4, 422), sep.assemble());
  auto rep0 = rot(tc, 1e-8);
  check_duality(rep0);
  CHECK(rep0.value <= 1e-6);

  auto ideal = teleportation_instrument(bell_measurement(2), BipartiteState(max_entangled(2)));
  auto rep1 = rot(ideal, 1e-8);
  check_duality(rep1);
  CHECK(rep1.value == doctest::Approx(1.0).epsilon(1e-5));

  // Dual normalization (1/d) tr_V B = 1 and decomposable W_a = B - A_a.
  const auto& bblk = rep1.dual_certificate.at("B");
  auto bmarg = 0.5 * partial_trace(bblk, {1});
  CHECK((bmarg - HermitianOperator::identity({2})).max_abs() < 1e-6);
  for (int a = 0; a < 4; ++a) {
    std::ostringstream ka, kw;
    ka << "A:" << a;
    kw << "W:" << a;
    auto w = bblk - rep1.dual_certificate.at(ka.str());
    CHECK((w - rep1.dual_certificate.at(kw.str())).max_abs() < 1e-6);
    CHECK(min_eigenvalue(partial_transpose(rep1.dual_certificate.at(kw.str()), 1)) >= -1e-7);
  }
}

TEST_CASE("rot equals robn with Bob fixed to the Bell measurement (Result 2 instances)") {
  auto bell = bell_measurement(2);
  for (uint64_t seed : {431, 432}) {
    auto rho = random_state({2, 2}, 2, seed);
    auto m = build_distributed(bell, bell, rho);
    auto t = teleportation_instrument(bell, rho);
    const double v_robn = robn(m, 1e-8).value;
    const double v_rot = rot(t, 1e-8).value;
    CHECK(v_robn == doctest::Approx(v_rot).epsilon(1e-5));
  }
}

TEST_CASE("robn_of_state: separable, phi+, and random states agree with roe") {
  auto sep = random_separable({2, 2}, 2, 441).assemble();
  auto r0 = robn_of_state(sep);
  CHECK(r0.robn_report.value <= 1e-6);
  CHECK(r0.roe_value <= 1e-6);
  CHECK(r0.consistent);

  auto r1 = robn_of_state(BipartiteState(max_entangled(2)));
  CHECK(r1.robn_report.value == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r1.roe_value == doctest::Approx(1.0).epsilon(1e-5));

  for (uint64_t seed : {442, 443}) {
    auto rho = random_state({2, 2}, 2, seed);
    auto r = robn_of_state(rho);
    CHECK(r.robn_report.value == doctest::Approx(r.roe_value).epsilon(1e-5));
  }
}

TEST_CASE("robn_of_state: see-saw refinement never loses value") {
  auto rho = random_state({2, 2}, 2, 451);
  RobnStateOptions plain;
  auto base = robn_of_state(rho, plain);
  RobnStateOptions with_seesaw;
  with_seesaw.seesaw = true;
  with_seesaw.seesaw_rounds = 1;
  auto refined = robn_of_state(rho, with_seesaw);
  CHECK(refined.robn_report.value >= base.robn_report.value - 1e-6);
}

TEST_CASE("property suite: small battery passes") {
  PropertySuiteOptions opts;
  opts.faithfulness_instances = 3;
  opts.convexity_pairs = 2;
  opts.monotonicity_instances = 4;
  opts.seed = 7;
  auto rep = property_suite(opts);
  for (const auto& c : rep.checks) {
    INFO(c.name, " worst ", c.worst_violation, " at ", c.counterexample);
    CHECK(c.passed);
  }
  CHECK(rep.all_passed);
}

TEST_CASE("scale covariance of roe under local unitaries") {
  auto rho = random_state({2, 2}, 3, 461);
  Rng rng(462);
  Matrix ua = random_unitary(2, rng), ub = random_unitary(2, rng);
  Matrix u = kron(ua, ub);
  BipartiteState rotated(HermitianOperator({2, 2}, Matrix(u * rho.op().matrix() * u.adjoint())));
  CHECK(roe(rho, 1e-8).value == doctest::Approx(roe(rotated, 1e-8).value).epsilon(1e-7));
}

TEST_CASE("mechanical dual of the robn program reproduces the primal value") {
  auto m = build_distributed(random_povm({2, 2}, 2, 471), random_povm({2, 2}, 2, 472),
                             random_state({2, 2}, 2, 473));
  auto p = robn_program(m);
  auto sp = conic::solve(p, 1e-8);
  REQUIRE(sp.status == conic::SolveStatus::Optimal);
  auto sd = conic::solve(conic::dualize(p), 1e-8);
  REQUIRE(sd.status == conic::SolveStatus::Optimal);
  CHECK(sd.objective_value == doctest::Approx(sp.objective_value).epsilon(1e-6));
  // The extracted multiplier family pairs with the measurement to 1 + r.
  auto rep = robn(m, 1e-8);
  CHECK(std::abs(rep.certificate_residual) <= 1e-6);
}
