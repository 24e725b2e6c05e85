#include "nlf/games.hpp"

#include <algorithm>
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

// Projects solver roundoff away so the matrix is an exact density operator.
HermitianOperator clip_to_density(const HermitianOperator& x) {
  auto es = eigen_system(x);
  Matrix out = Matrix::Zero(x.dim(), x.dim());
  double tracesum = 0.0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    const double v = std::max(0.0, es.values(i));
    tracesum += v;
    out += v * Matrix(es.vectors.col(i) * es.vectors.col(i).adjoint());
  }
  if (tracesum <= 0) throw InputError("clip_to_density: zero operator");
  return HermitianOperator(x.dims(), out / tracesum);
}

}  // namespace

StateEnsemble::StateEnsemble(int nx, int ny, std::vector<double> probs,
                             std::vector<HermitianOperator> states)
    : nx_(nx), ny_(ny), probs_(std::move(probs)), states_(std::move(states)) {
  if (nx_ <= 0 || ny_ <= 0 || probs_.size() != static_cast<size_t>(nx_) * ny_ ||
      states_.size() != probs_.size())
    throw InputError("StateEnsemble: shape mismatch");
  double s = 0.0;
  for (double p : probs_) {
    if (p < -1e-12) throw InputError("StateEnsemble: negative probability");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-10) throw InputError("StateEnsemble: probabilities do not sum to 1");
  for (const auto& st : states_) {
    if (st.dims() != states_.front().dims()) throw InputError("StateEnsemble: mixed state dims");
    if (st.num_subsystems() != 2) throw InputError("StateEnsemble: states must be bipartite");
    if (min_eigenvalue(st) < -1e-10 || std::abs(st.trace() - 1.0) > 1e-10)
      throw InputError("StateEnsemble: invalid state");
  }
}

GameRules::GameRules(StateEnsemble ensemble, int oa, int ob, std::vector<double> v)
    : ensemble_(std::move(ensemble)), oa_(oa), ob_(ob), v_(std::move(v)) {
  if (v_.size() != static_cast<size_t>(oa_) * ob_ * ensemble_.nx() * ensemble_.ny())
    throw InputError("GameRules: score table size mismatch");
  for (double x : v_)
    if (x < -1e-12 || x > 1.0 + 1e-12) throw InputError("GameRules: score outside [0,1]");
}

StateEnsemble optimal_dsd_ensemble(const std::vector<HermitianOperator>& cert, int oa, int ob) {
  if (cert.size() != static_cast<size_t>(oa) * ob)
    throw InputError("optimal_dsd_ensemble: certificate count mismatch");
  double c_total = 0.0;
  std::vector<double> traces(cert.size());
  for (size_t k = 0; k < cert.size(); ++k) {
    traces[k] = cert[k].trace();
    if (traces[k] < 0 && traces[k] > -1e-9) traces[k] = 0.0;
    c_total += traces[k];
  }
  if (c_total <= 1e-12) throw InputError("optimal_dsd_ensemble: degenerate all-zero certificate");
  std::vector<double> probs(cert.size());
  std::vector<HermitianOperator> states;
  states.reserve(cert.size());
  const auto& dims = cert.front().dims();
  const int d = cert.front().dim();
  for (size_t k = 0; k < cert.size(); ++k) {
    if (traces[k] > 1e-12) {
      probs[k] = traces[k] / c_total;
      states.push_back(clip_to_density((1.0 / traces[k]) * cert[k]));
    } else {
      probs[k] = 0.0;
      states.push_back((1.0 / d) * HermitianOperator::identity(dims));
    }
  }
  double s = 0.0;
  for (double p : probs) s += p;
  for (double& p : probs) p /= s;
  return StateEnsemble(oa, ob, std::move(probs), std::move(states));
}

StateEnsemble optimal_dsd_ensemble(const RobustnessReport& robn_report) {
  return optimal_dsd_ensemble(robn_report.certificate, robn_report.cert_outcomes_a,
                              robn_report.cert_outcomes_b);
}

double dsd_classical_score(const StateEnsemble& g, double tol, double* gap_out) {
  const int nx = g.nx(), ny = g.ny();
  const auto& ab = g.dims();
  const int da = ab[0], db = ab[1];

  ConeProgram p;
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) p.add_psd_and_ppt(key2("N", x, y), ab, 1);
  for (int x = 0; x < nx; ++x) p.add_free(key1("Na", x), {da});
  for (int y = 0; y < ny; ++y) p.add_free(key1("Nb", y), {db});

  for (int y = 0; y < ny; ++y) {
    std::vector<conic_::Term> terms;
    for (int x = 0; x < nx; ++x) terms.push_back({key2("N", x, y), 1.0, {}});
    terms.push_back({key1("Nb", y), -1.0, {MapStep::insert_ids(ab, {1})}});
    p.add_equality(key1("marg_b", y), std::move(terms), HermitianOperator::zero(ab));
  }
  for (int x = 0; x < nx; ++x) {
    std::vector<conic_::Term> terms;
    for (int y = 0; y < ny; ++y) terms.push_back({key2("N", x, y), 1.0, {}});
    terms.push_back({key1("Na", x), -1.0, {MapStep::insert_ids(ab, {0})}});
    p.add_equality(key1("marg_a", x), std::move(terms), HermitianOperator::zero(ab));
  }
  {
    std::vector<conic_::Term> terms;
    for (int y = 0; y < ny; ++y) terms.push_back({key1("Nb", y), 1.0, {}});
    p.add_equality("complete", std::move(terms), HermitianOperator::identity({db}));
  }

  Objective obj;
  obj.sense = Sense::Maximize;
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      obj.weights.push_back({key2("N", x, y), g.prob(x, y) * g.state(x, y)});
  p.set_objective(obj);

  Solution s = conic_::solve(p, tol);
  if (s.status != SolveStatus::Optimal)
    throw std::runtime_error("dsd_classical_score: solver returned " + conic_::to_string(s.status));
  if (gap_out) *gap_out = s.gap;
  return s.objective_value;
}

double dsd_quantum_score(const StateEnsemble& g, const DistributedMeasurement& m) {
  const int nx = g.nx(), ny = g.ny();
  const int oa = m.outcomes_a(), ob = m.outcomes_b();
  if (nx > oa || ny > ob)
    throw InputError("dsd_quantum_score: more questions than outcomes on a side");
  if (g.dims() != m.dims()) throw InputError("dsd_quantum_score: ensemble/measurement dims differ");

  // t[a][b][x][y] = p(x,y) tr[M_ab sigma_xy]
  std::vector<double> t(static_cast<size_t>(oa) * ob * nx * ny);
  for (int a = 0; a < oa; ++a)
    for (int b = 0; b < ob; ++b)
      for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
          t[((a * ob + b) * nx + x) * ny + y] =
              g.prob(x, y) *
              (m.element(a, b).matrix() * g.state(x, y).matrix()).trace().real();

  // Exhaustive search over deterministic relabelings g_B: b -> y; for each,
  // the optimal a -> x decouples per outcome a.
  double total_maps = std::pow(static_cast<double>(ny), ob);
  if (total_maps > 2e7)
    throw InputError("dsd_quantum_score: relabeling search space too large");
  const long n_maps = static_cast<long>(total_maps);
  std::vector<int> ymap(ob);
  double best = -1.0;
  for (long code = 0; code < n_maps; ++code) {
    long c = code;
    for (int b = 0; b < ob; ++b) {
      ymap[b] = static_cast<int>(c % ny);
      c /= ny;
    }
    double score = 0.0;
    for (int a = 0; a < oa; ++a) {
      double bestx = 0.0;
      for (int x = 0; x < nx; ++x) {
        double u = 0.0;
        for (int b = 0; b < ob; ++b) u += t[((a * ob + b) * nx + x) * ny + ymap[b]];
        bestx = std::max(bestx, u);
      }
      score += bestx;
    }
    best = std::max(best, score);
  }
  return best;
}

ScoreReport verify_result1(const DistributedMeasurement& m, double tol) {
  auto rep = robn(m, tol);
  auto ens = optimal_dsd_ensemble(rep);
  ScoreReport out;
  out.solve_tol = tol;
  out.reference_value = rep.value;
  out.quantum_score = dsd_quantum_score(ens, m);
  out.quantum_method = "certificate ensemble, trivial subroutine + relabeling search";
  out.classical_score = dsd_classical_score(ens, tol, &out.classical_gap);
  out.classical_method = "free-set SDP (PPT outer relaxation)";
  out.ratio = out.quantum_score / out.classical_score;
  out.robn_gap = rep.gap;
  out.robn_cert_residual = rep.certificate_residual;
  const double expect = 1.0 + rep.value;
  if (std::abs(out.ratio - expect) > 1e-4) {
    std::ostringstream os;
    os << "verify_result1: ratio " << out.ratio << " differs from 1 + RoBN " << expect
       << " (quantum " << out.quantum_score << ", classical " << out.classical_score << ")";
    throw ResultCheckFailure(os.str(), out);
  }
  return out;
}

ScoreReport tsd_scores(const StateEnsemble& g, const TeleportationInstrument& t, double tol) {
  const int nx = g.nx(), ny = g.ny();
  if (nx > t.outcomes()) throw InputError("tsd_scores: more x questions than instrument outcomes");
  if (g.dims()[0] != t.dim_v()) throw InputError("tsd_scores: ensemble A factor must feed the instrument");
  const int dbp = t.dim_out();
  const int db = g.dims()[1];
  const std::vector<int> bb = {dbp, db};

  // G_y = sum_x p(x,y) (Lambda_x (x) id)[sigma_xy]; a single SDP over Bob's POVM.
  std::vector<HermitianOperator> gy(ny, HermitianOperator::zero(bb));
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      if (g.prob(x, y) == 0.0) continue;
      gy[y] += g.prob(x, y) * t.apply_to_first(x, g.state(x, y));
    }

  ConeProgram p;
  for (int y = 0; y < ny; ++y) p.add_psd(key1("M", y), bb);
  std::vector<conic_::Term> terms;
  for (int y = 0; y < ny; ++y) terms.push_back({key1("M", y), 1.0, {}});
  p.add_equality("complete", std::move(terms), HermitianOperator::identity(bb));
  Objective obj;
  obj.sense = Sense::Maximize;
  for (int y = 0; y < ny; ++y) obj.weights.push_back({key1("M", y), gy[y]});
  p.set_objective(obj);
  Solution s = conic_::solve(p, tol);
  if (s.status != SolveStatus::Optimal)
    throw std::runtime_error("tsd_scores: solver returned " + conic_::to_string(s.status));

  ScoreReport out;
  out.solve_tol = tol;
  out.quantum_score = s.objective_value;
  out.quantum_gap = s.gap;
  out.quantum_method = "SDP over Bob POVM, trivial subroutine on Alice";
  out.classical_score = dsd_classical_score(g, tol, &out.classical_gap);
  out.classical_method = "free-set SDP (PPT outer relaxation, DSD baseline)";
  out.ratio = out.quantum_score / out.classical_score;
  return out;
}

ScoreReport esd_scores(const StateEnsemble& g, const BipartiteState& rho, const EsdOptions& opts) {
  if (rho.dim_a() != rho.dim_b()) throw InputError("esd_scores: Bell evaluation needs d (x) d states");
  const int d = rho.dim_a();
  Povm alice = bell_measurement(d);
  Povm bob = bell_measurement(d);
  auto m = build_distributed(alice, bob, rho);

  ScoreReport out;
  out.solve_tol = opts.tol;
  out.quantum_score = dsd_quantum_score(g, m);
  out.quantum_method = "Bell measurements both sides + relabeling search";
  out.classical_score = dsd_classical_score(g, opts.tol, &out.classical_gap);
  out.classical_method = "free-set SDP (PPT outer relaxation, DSD baseline)";
  out.ratio = out.quantum_score / out.classical_score;

  if (opts.seesaw) {
    // Monotone refinement of the aligned score over one POVM at a time.
    const int oa = m.outcomes_a(), ob = m.outcomes_b();
    std::vector<HermitianOperator> weights(static_cast<size_t>(oa) * ob,
                                           HermitianOperator::zero(g.dims()));
    for (int x = 0; x < g.nx(); ++x)
      for (int y = 0; y < g.ny(); ++y) weights[x * ob + y] = g.prob(x, y) * g.state(x, y);
    double current = out.quantum_score;
    for (int round = 0; round < opts.seesaw_rounds; ++round) {
      alice = optimize_local_povm(weights, oa, ob, alice, bob, rho, Side::Alice, opts.tol);
      bob = optimize_local_povm(weights, oa, ob, alice, bob, rho, Side::Bob, opts.tol);
      m = build_distributed(alice, bob, rho);
      const double refined = dsd_quantum_score(g, m);
      const double improvement = refined - current;
      if (refined > current) current = refined;
      if (improvement < opts.seesaw_min_step) break;
    }
    out.seesaw_score = std::max(current, out.quantum_score);
  }
  return out;
}

double game_value(const GameRules& rules, const Behaviour& behaviour) {
  const auto& g = rules.ensemble();
  if (behaviour.outcomes_a() != rules.outcomes_a() || behaviour.outcomes_b() != rules.outcomes_b() ||
      behaviour.questions_x() != g.nx() || behaviour.questions_y() != g.ny())
    throw InputError("game_value: index sets inconsistent");
  double total = 0.0;
  for (int x = 0; x < g.nx(); ++x)
    for (int y = 0; y < g.ny(); ++y)
      for (int a = 0; a < rules.outcomes_a(); ++a)
        for (int b = 0; b < rules.outcomes_b(); ++b)
          total += g.prob(x, y) * behaviour.p(a, b, x, y) * rules.v(a, b, x, y);
  return total;
}

MonotoneReport check_monotone(const DistributedMeasurement& m, const SimulationSubroutine& s,
                              const std::vector<StateEnsemble>& ensembles, double slack) {
  MonotoneReport rep;
  auto simulated = simulate(m, s);
  for (size_t i = 0; i < ensembles.size(); ++i) {
    const double before = dsd_quantum_score(ensembles[i], m);
    const double after = dsd_quantum_score(ensembles[i], simulated);
    const double inc = after - before;
    if (inc > rep.worst_increase) {
      rep.worst_increase = inc;
      rep.worst_ensemble = static_cast<int>(i);
      rep.score_before = before;
      rep.score_after = after;
    }
  }
  rep.passed = rep.worst_increase <= slack;
  return rep;
}

double min_entropy(const std::vector<double>& p) {
  double s = 0.0, mx = 0.0;
  for (double v : p) {
    if (v < -1e-12) throw InputError("min_entropy: negative probability");
    s += v;
    mx = std::max(mx, v);
  }
  if (std::abs(s - 1.0) > 1e-10) throw InputError("min_entropy: input not normalized");
  return -std::log2(mx);
}

double cond_min_entropy(const Eigen::MatrixXd& joint) {
  double s = 0.0, acc = 0.0;
  for (Eigen::Index gcol = 0; gcol < joint.cols(); ++gcol) {
    double mx = 0.0;
    for (Eigen::Index x = 0; x < joint.rows(); ++x) {
      if (joint(x, gcol) < -1e-12) throw InputError("cond_min_entropy: negative probability");
      s += joint(x, gcol);
      mx = std::max(mx, joint(x, gcol));
    }
    acc += mx;
  }
  if (std::abs(s - 1.0) > 1e-10) throw InputError("cond_min_entropy: input not normalized");
  return -std::log2(acc);
}

MinInfoReport min_accessible_info(const DistributedMeasurement& m, double tol) {
  auto rep = robn(m, tol);
  auto ens = optimal_dsd_ensemble(rep);

  MinInfoReport out;
  out.robn_value = rep.value;
  out.bits = std::log2(1.0 + rep.value);
  out.quantum_guess = dsd_quantum_score(ens, m);
  out.classical_guess = dsd_classical_score(ens, tol, &out.classical_gap);
  out.robn_gap = rep.gap;
  out.robn_cert_residual = rep.certificate_residual;
  out.witness_bits = std::log2(out.quantum_guess) - std::log2(out.classical_guess);

  // Literal single-shot entropies of the witness under the identity decoding.
  const int oa = m.outcomes_a(), ob = m.outcomes_b();
  out.hmin_xy = min_entropy(ens.probs());
  Eigen::MatrixXd joint(ens.nx() * ens.ny(), oa * ob);
  for (int x = 0; x < ens.nx(); ++x)
    for (int y = 0; y < ens.ny(); ++y)
      for (int a = 0; a < oa; ++a)
        for (int b = 0; b < ob; ++b)
          joint(x * ens.ny() + y, a * ob + b) =
              ens.prob(x, y) *
              (m.element(a, b).matrix() * ens.state(x, y).matrix()).trace().real();
  out.hmin_xy_given_g = cond_min_entropy(joint);

  if (std::abs(out.witness_bits - out.bits) > 1e-4) {
    std::ostringstream os;
    os << "min_accessible_info: witness attains " << out.witness_bits << " bits, expected "
       << out.bits;
    ScoreReport diag;
    diag.quantum_score = out.quantum_guess;
    diag.classical_score = out.classical_guess;
    diag.ratio = out.quantum_guess / out.classical_guess;
    diag.reference_value = rep.value;
    throw ResultCheckFailure(os.str(), diag);
  }
  return out;
}

}  // namespace nlf
