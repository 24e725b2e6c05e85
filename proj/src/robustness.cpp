#include "nlf/robustness.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace nlf {

namespace conic_ = nlf::conic;

namespace {

using conic_::ConeProgram;
using conic_::MapStep;
using conic_::Objective;
using conic_::Sense;
using conic_::Solution;
using conic_::SolveStatus;

std::string key2(const char* stem, int a, int b) {
  std::ostringstream os;
  os << stem << ":" << a << ":" << b;
  return os.str();
}

std::string key1(const char* stem, int a) {
  std::ostringstream os;
  os << stem << ":" << a;
  return os.str();
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

void require_optimal(const Solution& s, const char* what, RobustnessReport&& partial) {
  if (s.status != SolveStatus::Optimal) {
    std::ostringstream os;
    os << what << ": solver returned " << conic_::to_string(s.status) << " (" << s.message << ")";
    throw SolverFailure(os.str(), std::move(partial));
  }
}

}  // namespace

conic_::ConeProgram robn_program(const DistributedMeasurement& m) {
  const int oa = m.outcomes_a(), ob = m.outcomes_b();
  const int da = m.dim_a(), db = m.dim_b();
  const std::vector<int> ab = {da, db};

  // Otilde_ab is carried implicitly as M_ab + Ntilde_ab + Slack_ab (PSD since
  // all three parts are), so only its partial transpose needs its own block.
  ConeProgram p;
  p.add_free("r", {1});
  p.add_free("nscale", {1});
  for (int a = 0; a < oa; ++a)
    for (int b = 0; b < ob; ++b) {
      p.add_psd(key2("Ntilde", a, b), ab);
      p.add_psd(key2("Slack", a, b), ab);
      p.add_psd(key2("OtildePT", a, b), ab);
    }
  for (int a = 0; a < oa; ++a) {
    p.add_free(key1("Oa", a), {da});
    p.add_free(key1("na", a), {da});
  }
  for (int b = 0; b < ob; ++b) {
    p.add_free(key1("Ob", b), {db});
    p.add_free(key1("nb", b), {db});
  }

  // PT(M + Ntilde + Slack) = OtildePT.
  for (int a = 0; a < oa; ++a)
    for (int b = 0; b < ob; ++b)
      p.add_equality(key2("ppt", a, b),
                     {{key2("Ntilde", a, b), 1.0, {MapStep::ptranspose(1)}},
                      {key2("Slack", a, b), 1.0, {MapStep::ptranspose(1)}},
                      {key2("OtildePT", a, b), -1.0, {}}},
                     -1.0 * partial_transpose(m.element(a, b), 1));

  // sum_a Otilde_ab = 1 (x) Ob_b;  sum_b Otilde_ab = Oa_a (x) 1.
  for (int b = 0; b < ob; ++b) {
    std::vector<conic_::Term> terms;
    HermitianOperator rhs = HermitianOperator::zero(ab);
    for (int a = 0; a < oa; ++a) {
      terms.push_back({key2("Ntilde", a, b), 1.0, {}});
      terms.push_back({key2("Slack", a, b), 1.0, {}});
      rhs -= m.element(a, b);
    }
    terms.push_back({key1("Ob", b), -1.0, {MapStep::insert_ids(ab, {1})}});
    p.add_equality(key1("omarg_b", b), std::move(terms), rhs);
  }
  for (int a = 0; a < oa; ++a) {
    std::vector<conic_::Term> terms;
    HermitianOperator rhs = HermitianOperator::zero(ab);
    for (int b = 0; b < ob; ++b) {
      terms.push_back({key2("Ntilde", a, b), 1.0, {}});
      terms.push_back({key2("Slack", a, b), 1.0, {}});
      rhs -= m.element(a, b);
    }
    terms.push_back({key1("Oa", a), -1.0, {MapStep::insert_ids(ab, {0})}});
    p.add_equality(key1("omarg_a", a), std::move(terms), rhs);
  }
  // sum_b Ob_b = (1 + r) 1^B; the A-side total follows and is omitted.
  {
    std::vector<conic_::Term> terms;
    for (int b = 0; b < ob; ++b) terms.push_back({key1("Ob", b), 1.0, {}});
    terms.push_back({"r", -1.0, {MapStep::embed_scalar(HermitianOperator::identity({db}))}});
    p.add_equality("osum", std::move(terms), HermitianOperator::identity({db}));
  }

  // Identical no-signalling structure for the noise family. Its overall
  // scale is a separate cone scale s <= r (the trace of the covering
  // equation forces s <= r, and padding with the slack family lifts any
  // s < r solution to s = r without changing r), so tying it to r is not
  // needed and would entangle the dual normalization.
  for (int b = 0; b < ob; ++b) {
    std::vector<conic_::Term> terms;
    for (int a = 0; a < oa; ++a) terms.push_back({key2("Ntilde", a, b), 1.0, {}});
    terms.push_back({key1("nb", b), -1.0, {MapStep::insert_ids(ab, {1})}});
    p.add_equality(key1("nmarg_b", b), std::move(terms), HermitianOperator::zero(ab));
  }
  for (int a = 0; a < oa; ++a) {
    std::vector<conic_::Term> terms;
    for (int b = 0; b < ob; ++b) terms.push_back({key2("Ntilde", a, b), 1.0, {}});
    terms.push_back({key1("na", a), -1.0, {MapStep::insert_ids(ab, {0})}});
    p.add_equality(key1("nmarg_a", a), std::move(terms), HermitianOperator::zero(ab));
  }
  {
    std::vector<conic_::Term> terms;
    for (int b = 0; b < ob; ++b) terms.push_back({key1("nb", b), 1.0, {}});
    terms.push_back({"nscale", -1.0, {MapStep::embed_scalar(HermitianOperator::identity({db}))}});
    p.add_equality("nsum", std::move(terms), HermitianOperator::zero({db}));
  }

  Objective obj;
  obj.sense = Sense::Minimize;
  obj.weights.push_back({"r", HermitianOperator::scalar(1.0)});
  p.set_objective(obj);
  return p;
}

RobustnessReport robn(const DistributedMeasurement& m, double tol) {
  const double t0 = now_seconds();
  const int oa = m.outcomes_a(), ob = m.outcomes_b();
  const int da = m.dim_a();

  ConeProgram p = robn_program(m);
  Solution s = conic_::solve(p, tol);

  RobustnessReport rep;
  rep.solve_tol = tol;
  rep.status = s.status;
  rep.iterations = s.iterations;
  rep.gap = s.gap;
  rep.value = s.objective_value;
  rep.cert_outcomes_a = oa;
  rep.cert_outcomes_b = ob;
  require_optimal(s, "robn", std::move(rep));

  // Primal witness: noise and cover families.
  for (int a = 0; a < oa; ++a)
    for (int b = 0; b < ob; ++b) {
      const auto& nt = s.primal.at(key2("Ntilde", a, b));
      const auto& sl = s.primal.at(key2("Slack", a, b));
      rep.primal_witness.emplace(key2("Ntilde", a, b), nt);
      rep.primal_witness.emplace(key2("Otilde", a, b), m.element(a, b) + nt + sl);
    }

  // Dual certificate in the multiplier-family shape {A, B, C, D, E, F}.
  // With the minimization
  // convention used by the solver, A_ab is the dual slack of Slack_ab and
  // C_a + B_b - A_ab = PT(Z) for the PSD dual block Z of OtildePT_ab.
  double cert_sum = 0.0;
  for (int a = 0; a < oa; ++a)
    for (int b = 0; b < ob; ++b) {
      HermitianOperator a_blk = s.cone_duals.at(key2("Slack", a, b));
      cert_sum += (a_blk.matrix() * m.element(a, b).matrix()).trace().real();
      HermitianOperator f_blk =
          partial_transpose(s.cone_duals.at(key2("OtildePT", a, b)), 1);
      rep.dual_certificate.emplace(key2("A", a, b), a_blk);
      rep.dual_certificate.emplace(key2("F", a, b), f_blk);
      rep.certificate.push_back(std::move(a_blk));
    }
  for (int b = 0; b < ob; ++b)
    rep.dual_certificate.emplace(key1("B", b), -1.0 * s.equality_duals.at(key1("omarg_b", b)));
  for (int a = 0; a < oa; ++a)
    rep.dual_certificate.emplace(key1("C", a), -1.0 * s.equality_duals.at(key1("omarg_a", a)));
  rep.dual_certificate.emplace("E", -1.0 * s.equality_duals.at("osum"));
  rep.dual_certificate.emplace("D", HermitianOperator::zero({da}));

  rep.certificate_residual = std::abs(cert_sum - 1.0 - rep.value);
  rep.wall_seconds = now_seconds() - t0;
  return rep;
}

RobustnessReport rot(const TeleportationInstrument& t, double tol) {
  const double t0 = now_seconds();
  const int o = t.outcomes();
  const int dv = t.dim_v(), dbp = t.dim_out();
  const std::vector<int> vb = {dv, dbp};

  ConeProgram p;
  p.add_free("sigma", {dbp});
  for (int a = 0; a < o; ++a) {
    p.add_psd(key1("Slack", a), vb);  // F_a = J_a + Slack_a
    p.add_psd(key1("FPT", a), vb);
  }
  for (int a = 0; a < o; ++a)
    p.add_equality(key1("ppt", a),
                   {{key1("Slack", a), 1.0, {MapStep::ptranspose(1)}}, {key1("FPT", a), -1.0, {}}},
                   -1.0 * partial_transpose(t.choi(a), 1));
  {
    std::vector<conic_::Term> terms;
    HermitianOperator rhs = HermitianOperator::zero(vb);
    for (int a = 0; a < o; ++a) {
      terms.push_back({key1("Slack", a), 1.0, {}});
      rhs -= t.choi(a);
    }
    terms.push_back({"sigma", -1.0 / dv, {MapStep::insert_ids(vb, {1})}});
    p.add_equality("sum", std::move(terms), rhs);
  }
  Objective obj;
  obj.sense = Sense::Minimize;
  obj.weights.push_back({"sigma", HermitianOperator::identity({dbp})});
  obj.constant = -1.0;
  p.set_objective(obj);

  Solution s = conic_::solve(p, tol);
  RobustnessReport rep;
  rep.solve_tol = tol;
  rep.status = s.status;
  rep.iterations = s.iterations;
  rep.gap = s.gap;
  rep.value = s.objective_value;
  rep.cert_outcomes_a = o;
  rep.cert_outcomes_b = 1;
  require_optimal(s, "rot", std::move(rep));

  const double r = rep.value;
  rep.primal_witness.emplace("sigma_tilde", s.primal.at("sigma"));
  double cert_sum = 0.0;
  for (int a = 0; a < o; ++a) {
    HermitianOperator f = t.choi(a) + s.primal.at(key1("Slack", a));
    rep.primal_witness.emplace(key1("Gamma", a), (1.0 / (1.0 + r)) * f);
    if (r > 1e-9)
      rep.primal_witness.emplace(key1("Omega", a), (1.0 / r) * s.primal.at(key1("Slack", a)));
    HermitianOperator a_blk = s.cone_duals.at(key1("Slack", a));
    cert_sum += (a_blk.matrix() * t.choi(a).matrix()).trace().real();
    rep.dual_certificate.emplace(key1("A", a), a_blk);
    rep.dual_certificate.emplace(key1("W", a),
                                 partial_transpose(s.cone_duals.at(key1("FPT", a)), 1));
    rep.certificate.push_back(std::move(a_blk));
  }
  rep.dual_certificate.emplace("B", -1.0 * s.equality_duals.at("sum"));
  rep.certificate_residual = std::abs(cert_sum - 1.0 - rep.value);
  rep.wall_seconds = now_seconds() - t0;
  return rep;
}

RobustnessReport roe(const BipartiteState& rho, double tol) {
  const double t0 = now_seconds();
  const std::vector<int> ab = rho.op().dims();

  ConeProgram p;
  p.add_psd("Slack", ab);  // sigma_tilde = rho + Slack
  p.add_psd("SigmaPT", ab);
  p.add_equality("ppt",
                 {{"Slack", 1.0, {MapStep::ptranspose(1)}}, {"SigmaPT", -1.0, {}}},
                 -1.0 * partial_transpose(rho.op(), 1));
  Objective obj;
  obj.sense = Sense::Minimize;
  obj.weights.push_back({"Slack", HermitianOperator::identity(ab)});
  obj.constant = rho.op().trace() - 1.0;
  p.set_objective(obj);

  Solution s = conic_::solve(p, tol);
  RobustnessReport rep;
  rep.solve_tol = tol;
  rep.status = s.status;
  rep.iterations = s.iterations;
  rep.gap = s.gap;
  rep.value = s.objective_value;
  require_optimal(s, "roe", std::move(rep));

  const double r = rep.value;
  HermitianOperator sigma_tilde = rho.op() + s.primal.at("Slack");
  rep.primal_witness.emplace("sigma_tilde", sigma_tilde);
  rep.primal_witness.emplace("sigma", (1.0 / (1.0 + r)) * sigma_tilde);
  if (r > 1e-9) rep.primal_witness.emplace("eta", (1.0 / r) * s.primal.at("Slack"));

  HermitianOperator a_blk = s.cone_duals.at("Slack");
  const double cert = (a_blk.matrix() * rho.op().matrix()).trace().real();
  rep.certificate_residual = std::abs(cert - 1.0 - rep.value);
  rep.dual_certificate.emplace("A", a_blk);
  rep.dual_certificate.emplace("W", partial_transpose(s.cone_duals.at("SigmaPT"), 1));
  rep.certificate.push_back(std::move(a_blk));
  rep.wall_seconds = now_seconds() - t0;
  return rep;
}

Povm optimize_local_povm(const std::vector<HermitianOperator>& cert, int oa, int ob,
                         const Povm& alice, const Povm& bob, const BipartiteState& rho, Side side,
                         double tol) {
  const int da = alice.dims()[0], dap = alice.dims()[1];
  const std::vector<int> full = {da, dap, bob.dims()[0], bob.dims()[1]};
  HermitianOperator emb_rho = insert_identities(rho.op(), full, {1, 2});

  const int n_out = side == Side::Alice ? oa : ob;
  std::vector<int> povm_dims = side == Side::Alice ? alice.dims() : bob.dims();
  std::vector<HermitianOperator> coeffs(n_out, HermitianOperator::zero(povm_dims));
  for (int a = 0; a < oa; ++a)
    for (int b = 0; b < ob; ++b) {
      HermitianOperator cert_emb = insert_identities(cert[a * ob + b], full, {0, 3});
      Matrix g = emb_rho.matrix() * cert_emb.matrix();
      if (side == Side::Alice) {
        Matrix other = insert_identities(bob.element(b), full, {2, 3}).matrix();
        Matrix k = partial_trace(Matrix(other * g), full, {0, 1});
        coeffs[a] += HermitianOperator(povm_dims, ((k + k.adjoint()) / 2.0).eval());
      } else {
        Matrix other = insert_identities(alice.element(a), full, {0, 1}).matrix();
        Matrix k = partial_trace(Matrix(other * g), full, {2, 3});
        coeffs[b] += HermitianOperator(povm_dims, ((k + k.adjoint()) / 2.0).eval());
      }
    }

  ConeProgram p;
  for (int k = 0; k < n_out; ++k) p.add_psd(key1("M", k), povm_dims);
  std::vector<conic_::Term> terms;
  for (int k = 0; k < n_out; ++k) terms.push_back({key1("M", k), 1.0, {}});
  p.add_equality("complete", std::move(terms), HermitianOperator::identity(povm_dims));
  Objective obj;
  obj.sense = Sense::Maximize;
  for (int k = 0; k < n_out; ++k) obj.weights.push_back({key1("M", k), coeffs[k]});
  p.set_objective(obj);
  Solution s = conic_::solve(p, tol);
  if (s.status != SolveStatus::Optimal) throw std::runtime_error("see-saw POVM step failed");
  // The iterate sums to the identity only up to solver tolerance; the
  // symmetric sandwich T^{-1/2} M_k T^{-1/2} restores exact completeness
  // while keeping every element PSD.
  HermitianOperator sum = HermitianOperator::zero(povm_dims);
  for (int k = 0; k < n_out; ++k) sum += s.primal.at(key1("M", k));
  Eigen::SelfAdjointEigenSolver<Matrix> es(sum.matrix());
  Matrix isq = es.operatorInverseSqrt();
  std::vector<HermitianOperator> elems;
  for (int k = 0; k < n_out; ++k)
    elems.emplace_back(povm_dims, Matrix(isq * s.primal.at(key1("M", k)).matrix() * isq));
  return Povm(std::move(elems));
}

RobnStateReport robn_of_state(const BipartiteState& rho, const RobnStateOptions& opts) {
  if (rho.dim_a() != rho.dim_b())
    throw InputError("robn_of_state: Bell-measurement construction needs d (x) d states");
  const int d = rho.dim_a();
  Povm alice = bell_measurement(d);
  Povm bob = bell_measurement(d);

  RobnStateReport out;
  auto m = build_distributed(alice, bob, rho);
  out.robn_report = robn(m, opts.tol);

  if (opts.seesaw) {
    // Exploratory refinement: each accepted step can only increase the value
    // because the previous certificate stays dual feasible.
    for (int round = 0; round < opts.seesaw_rounds; ++round) {
      const double before = out.robn_report.value;
      alice = optimize_local_povm(out.robn_report.certificate, m.outcomes_a(), m.outcomes_b(), alice,
                              bob, rho, Side::Alice, opts.tol);
      m = build_distributed(alice, bob, rho);
      auto rep_a = robn(m, opts.tol);
      if (rep_a.value > out.robn_report.value) out.robn_report = rep_a;
      bob = optimize_local_povm(out.robn_report.certificate, m.outcomes_a(), m.outcomes_b(), alice, bob,
                            rho, Side::Bob, opts.tol);
      m = build_distributed(alice, bob, rho);
      auto rep_b = robn(m, opts.tol);
      if (rep_b.value > out.robn_report.value) out.robn_report = rep_b;
      if (out.robn_report.value - before < 1e-7) break;
    }
  }

  auto roe_rep = roe(rho, opts.tol);
  out.roe_value = roe_rep.value;
  out.disagreement = std::abs(out.robn_report.value - out.roe_value);
  const double allowed = 10.0 * std::max({opts.tol, out.robn_report.gap, roe_rep.gap, 1e-9});
  out.consistent = out.disagreement <= allowed;
  if (!out.consistent) {
    std::ostringstream os;
    os << "robn_of_state: Bell-measurement RoBN " << out.robn_report.value
       << " disagrees with RoE " << out.roe_value << " by " << out.disagreement;
    throw RobnRoeMismatch(os.str(), out);
  }
  return out;
}

PropertySuiteReport property_suite(const PropertySuiteOptions& opts) {
  PropertySuiteReport rep;
  const int d = opts.local_dim;
  const int o = opts.outcomes;

  auto record = [&](PropertyCheck c) {
    rep.all_passed = rep.all_passed && c.passed;
    rep.checks.push_back(std::move(c));
  };
  auto audited_robn = [&](const DistributedMeasurement& m) {
    auto r = robn(m, opts.tol);
    rep.max_gap = std::max(rep.max_gap, r.gap);
    rep.max_cert_residual = std::max(rep.max_cert_residual, r.certificate_residual);
    return r.value;
  };

  {
    PropertyCheck c{"faithfulness", true, 0.0, ""};
    for (int i = 0; i < opts.faithfulness_instances; ++i) {
      const uint64_t s = opts.seed + 1000 + i;
      auto m = build_free_distributed(random_povm({d, d}, o, s), random_povm({d, d}, o, s + 500),
                                      random_separable({d, d}, 2, s + 900));
      const double v = audited_robn(m);
      if (v > c.worst_violation) {
        c.worst_violation = v;
        std::ostringstream os;
        os << "seed " << s << " value " << v;
        c.counterexample = os.str();
      }
    }
    c.passed = c.worst_violation <= opts.slack;
    record(std::move(c));
  }

  {
    PropertyCheck c{"convexity", true, 0.0, ""};
    const double grid[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int i = 0; i < opts.convexity_pairs; ++i) {
      const uint64_t s = opts.seed + 2000 + i;
      auto m1 = build_distributed(random_povm({d, d}, o, s), random_povm({d, d}, o, s + 300),
                                  random_state({d, d}, 2, s + 600));
      auto m2 = build_distributed(random_povm({d, d}, o, s + 1), random_povm({d, d}, o, s + 301),
                                  random_state({d, d}, 4, s + 601));
      const double r1 = audited_robn(m1);
      const double r2 = audited_robn(m2);
      for (double pmix : grid) {
        double rmix;
        if (pmix == 0.0) {
          rmix = r2;
        } else if (pmix == 1.0) {
          rmix = r1;
        } else {
          std::vector<HermitianOperator> elems;
          for (int k = 0; k < o * o; ++k)
            elems.push_back(pmix * m1.elements()[k] + (1 - pmix) * m2.elements()[k]);
          rmix = audited_robn(DistributedMeasurement(o, o, std::move(elems)));
        }
        const double viol = rmix - (pmix * r1 + (1 - pmix) * r2);
        if (viol > c.worst_violation) {
          c.worst_violation = viol;
          std::ostringstream os;
          os << "seed " << s << " p " << pmix << " lhs " << rmix << " rhs "
             << pmix * r1 + (1 - pmix) * r2;
          c.counterexample = os.str();
        }
      }
    }
    c.passed = c.worst_violation <= opts.slack;
    record(std::move(c));
  }

  {
    PropertyCheck c{"monotonicity", true, 0.0, ""};
    for (int i = 0; i < opts.monotonicity_instances; ++i) {
      const uint64_t s = opts.seed + 3000 + i;
      auto m = build_distributed(random_povm({d, d}, o, s), random_povm({d, d}, o, s + 400),
                                 random_state({d, d}, 1 + (i % 4), s + 800));
      auto sub = random_subroutine(o, o, {d}, {d}, 2, s + 777);
      const double before = audited_robn(m);
      const double after = audited_robn(simulate(m, sub));
      const double viol = after - before;
      if (viol > c.worst_violation) {
        c.worst_violation = viol;
        std::ostringstream os;
        os << "seed " << s << " before " << before << " after " << after;
        c.counterexample = os.str();
      }
    }
    c.passed = c.worst_violation <= opts.slack;
    record(std::move(c));
  }

  return rep;
}

}  // namespace nlf
