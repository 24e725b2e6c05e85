#include "nlf/qobj.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nlf {

namespace {

constexpr double kPsdTol = 1e-10;
constexpr double kSumTol = 1e-10;

void require_psd(const HermitianOperator& x, const char* what) {
  if (min_eigenvalue(x) < -kPsdTol) {
    std::ostringstream os;
    os << what << ": not PSD within 1e-10 (min eigenvalue " << min_eigenvalue(x) << ")";
    throw InputError(os.str());
  }
}

void require_density(const HermitianOperator& x, const char* what) {
  require_psd(x, what);
  if (std::abs(x.trace() - 1.0) > kSumTol) throw InputError(std::string(what) + ": trace is not 1");
}

}  // namespace

double Rng::gauss() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 1e-300) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2);
}

Povm::Povm(std::vector<HermitianOperator> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw InputError("Povm: no elements");
  HermitianOperator sum = HermitianOperator::zero(elements_.front().dims());
  for (const auto& e : elements_) {
    if (e.dims() != elements_.front().dims()) throw InputError("Povm: inhomogeneous element dims");
    require_psd(e, "Povm element");
    sum += e;
  }
  if ((sum - HermitianOperator::identity(sum.dims())).max_abs() > kSumTol)
    throw InputError("Povm: elements do not sum to the identity within 1e-10");
}

BipartiteState::BipartiteState(HermitianOperator op) : op_(std::move(op)) {
  if (op_.num_subsystems() != 2) throw InputError("BipartiteState: dims must have two factors");
  require_density(op_, "BipartiteState");
}

SeparableModel::SeparableModel(std::vector<double> weights, std::vector<HermitianOperator> local_a,
                               std::vector<HermitianOperator> local_b)
    : weights_(std::move(weights)), local_a_(std::move(local_a)), local_b_(std::move(local_b)) {
  if (weights_.empty() || weights_.size() != local_a_.size() || weights_.size() != local_b_.size())
    throw InputError("SeparableModel: inconsistent term counts");
  double s = 0.0;
  for (double w : weights_) {
    if (w < -1e-12) throw InputError("SeparableModel: negative weight");
    s += w;
  }
  if (std::abs(s - 1.0) > kSumTol) throw InputError("SeparableModel: weights do not sum to 1");
  for (const auto& r : local_a_) require_density(r, "SeparableModel local state");
  for (const auto& r : local_b_) require_density(r, "SeparableModel local state");
}

BipartiteState SeparableModel::assemble() const {
  std::vector<int> dims = {local_a_.front().dim(), local_b_.front().dim()};
  HermitianOperator acc = HermitianOperator::zero(dims);
  for (int l = 0; l < terms(); ++l) {
    HermitianOperator t = tensor(local_a_[l], local_b_[l]);
    acc += weights_[l] * HermitianOperator(dims, t.matrix());
  }
  return BipartiteState(acc);
}

DistributedMeasurement::DistributedMeasurement(int outcomes_a, int outcomes_b,
                                               std::vector<HermitianOperator> elements,
                                               std::optional<Provenance> provenance)
    : oa_(outcomes_a), ob_(outcomes_b), elements_(std::move(elements)), provenance_(std::move(provenance)) {
  if (oa_ <= 0 || ob_ <= 0 || elements_.size() != static_cast<size_t>(oa_) * ob_)
    throw InputError("DistributedMeasurement: element count mismatch");
  if (elements_.front().num_subsystems() != 2)
    throw InputError("DistributedMeasurement: elements must be bipartite");
  HermitianOperator sum = HermitianOperator::zero(elements_.front().dims());
  for (const auto& e : elements_) {
    if (e.dims() != elements_.front().dims())
      throw InputError("DistributedMeasurement: inhomogeneous element dims");
    require_psd(e, "DistributedMeasurement element");
    sum += e;
  }
  if ((sum - HermitianOperator::identity(sum.dims())).max_abs() > kSumTol)
    throw InputError("DistributedMeasurement: completeness violated");
  if (provenance_ && no_signalling_residual() > 1e-9)
    throw InputError("DistributedMeasurement: constructed element list violates no-signalling");
}

double DistributedMeasurement::no_signalling_residual() const {
  const int da = dim_a(), db = dim_b();
  double worst = 0.0;
  for (int b = 0; b < ob_; ++b) {
    HermitianOperator t = HermitianOperator::zero(dims());
    for (int a = 0; a < oa_; ++a) t += element(a, b);
    HermitianOperator marg = partial_trace(t, {1});
    HermitianOperator recon = insert_identities((1.0 / da) * marg, dims(), {1});
    worst = std::max(worst, (t - recon).max_abs());
  }
  for (int a = 0; a < oa_; ++a) {
    HermitianOperator t = HermitianOperator::zero(dims());
    for (int b = 0; b < ob_; ++b) t += element(a, b);
    HermitianOperator marg = partial_trace(t, {0});
    HermitianOperator recon = insert_identities((1.0 / db) * marg, dims(), {0});
    worst = std::max(worst, (t - recon).max_abs());
  }
  return worst;
}

TeleportationInstrument::TeleportationInstrument(
    std::vector<HermitianOperator> choi, std::optional<std::pair<Povm, BipartiteState>> provenance)
    : choi_(std::move(choi)), provenance_(std::move(provenance)) {
  if (choi_.empty()) throw InputError("TeleportationInstrument: no subchannels");
  HermitianOperator sum = HermitianOperator::zero(choi_.front().dims());
  for (const auto& j : choi_) {
    if (j.dims() != choi_.front().dims())
      throw InputError("TeleportationInstrument: inhomogeneous Choi dims");
    if (j.num_subsystems() != 2) throw InputError("TeleportationInstrument: Choi must be bipartite");
    require_psd(j, "TeleportationInstrument Choi block");
    sum += j;
  }
  // sum_a J_a = (1/d_V) 1 (x) rho for a density rho: the instrument's own
  // no-signalling constraint.
  const int dv = dim_v();
  HermitianOperator rho = partial_trace(sum, {1});
  HermitianOperator recon = insert_identities((1.0 / dv) * rho, sum.dims(), {1});
  if ((sum - recon).max_abs() > 1e-9)
    throw InputError("TeleportationInstrument: outcome-summed Choi is not (1/d)1 (x) rho");
  if (std::abs(rho.trace() - 1.0) > 1e-8)
    throw InputError("TeleportationInstrument: channel is not trace preserving");
}

HermitianOperator TeleportationInstrument::apply(int a, const HermitianOperator& omega) const {
  const int dv = dim_v();
  if (omega.dim() != dv) throw InputError("TeleportationInstrument::apply: input dim mismatch");
  Matrix ot = omega.matrix().transpose();
  Matrix big = kron(ot, Matrix::Identity(dim_out(), dim_out()));
  Matrix res = dv * partial_trace(big * choi_.at(a).matrix(), choi_.at(a).dims(), {1});
  return HermitianOperator({dim_out()}, res);
}

HermitianOperator TeleportationInstrument::apply_to_first(int a, const HermitianOperator& sigma) const {
  // sigma on (V, B); output on (B', B). Work in the (V, B', B) order.
  const int dv = dim_v(), dout = dim_out();
  if (sigma.num_subsystems() != 2 || sigma.dims()[0] != dv)
    throw InputError("apply_to_first: dims mismatch");
  const int db = sigma.dims()[1];
  HermitianOperator sig_t = partial_transpose(sigma, 0);
  HermitianOperator sig_emb = insert_identities(sig_t, {dv, dout, db}, {0, 2});
  HermitianOperator j_emb = insert_identities(choi_.at(a), {dv, dout, db}, {0, 1});
  Matrix prod = sig_emb.matrix() * j_emb.matrix();
  Matrix res = dv * partial_trace(prod, {dv, dout, db}, {1, 2});
  return HermitianOperator({dout, db}, res);
}

SimulationSubroutine::SimulationSubroutine(std::vector<double> weights,
                                           std::vector<Eigen::MatrixXd> post_alice,
                                           std::vector<Eigen::MatrixXd> post_bob,
                                           std::vector<LinearMapOnOperators> pre_alice,
                                           std::vector<LinearMapOnOperators> pre_bob)
    : weights_(std::move(weights)),
      post_alice_(std::move(post_alice)),
      post_bob_(std::move(post_bob)),
      pre_alice_(std::move(pre_alice)),
      pre_bob_(std::move(pre_bob)) {
  const size_t n = weights_.size();
  if (n == 0 || post_alice_.size() != n || post_bob_.size() != n || pre_alice_.size() != n ||
      pre_bob_.size() != n)
    throw InputError("SimulationSubroutine: inconsistent term counts");
  double s = 0.0;
  for (double w : weights_) {
    if (w < -1e-12) throw InputError("SimulationSubroutine: negative weight");
    s += w;
  }
  if (std::abs(s - 1.0) > kSumTol) throw InputError("SimulationSubroutine: weights do not sum to 1");
  auto check_stochastic = [](const Eigen::MatrixXd& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double c = 0.0;
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (m(i, j) < -1e-12) throw InputError("SimulationSubroutine: negative transition probability");
        c += m(i, j);
      }
      if (std::abs(c - 1.0) > kSumTol)
        throw InputError("SimulationSubroutine: stochastic matrix column not normalized");
    }
  };
  for (const auto& m : post_alice_) check_stochastic(m);
  for (const auto& m : post_bob_) check_stochastic(m);
  for (const auto& ch : pre_alice_)
    if (!ch.trace_preserving()) throw InputError("SimulationSubroutine: pre-processing not TP");
  for (const auto& ch : pre_bob_)
    if (!ch.trace_preserving()) throw InputError("SimulationSubroutine: pre-processing not TP");
}

SimulationSubroutine SimulationSubroutine::trivial(int outcomes_a, int outcomes_b,
                                                   std::vector<int> dims_a, std::vector<int> dims_b) {
  return SimulationSubroutine(
      {1.0}, {Eigen::MatrixXd::Identity(outcomes_a, outcomes_a)},
      {Eigen::MatrixXd::Identity(outcomes_b, outcomes_b)}, {LinearMapOnOperators::identity(dims_a)},
      {LinearMapOnOperators::identity(dims_b)});
}

SimulationSubroutine SimulationSubroutine::compose(const SimulationSubroutine& first,
                                                   const SimulationSubroutine& second) {
  std::vector<double> w;
  std::vector<Eigen::MatrixXd> pa, pb;
  std::vector<LinearMapOnOperators> ca, cb;
  for (int l1 = 0; l1 < first.terms(); ++l1)
    for (int l2 = 0; l2 < second.terms(); ++l2) {
      w.push_back(first.weights()[l1] * second.weights()[l2]);
      pa.push_back(second.post_alice(l2) * first.post_alice(l1));
      pb.push_back(second.post_bob(l2) * first.post_bob(l1));
      // Channels compose inner-first: the first subroutine's channel acts
      // closest to the measurement.
      ca.push_back(first.pre_alice(l1).compose_after(second.pre_alice(l2)));
      cb.push_back(first.pre_bob(l1).compose_after(second.pre_bob(l2)));
    }
  return SimulationSubroutine(std::move(w), std::move(pa), std::move(pb), std::move(ca), std::move(cb));
}

Behaviour::Behaviour(int outcomes_a, int outcomes_b, int questions_x, int questions_y,
                     std::vector<double> table)
    : oa_(outcomes_a), ob_(outcomes_b), nx_(questions_x), ny_(questions_y), table_(std::move(table)) {
  if (table_.size() != static_cast<size_t>(oa_) * ob_ * nx_ * ny_)
    throw InputError("Behaviour: table size mismatch");
  for (int x = 0; x < nx_; ++x)
    for (int y = 0; y < ny_; ++y) {
      double s = 0.0;
      for (int a = 0; a < oa_; ++a)
        for (int b = 0; b < ob_; ++b) {
          const double v = p(a, b, x, y);
          if (v < -1e-10) throw InputError("Behaviour: negative probability");
          s += v;
        }
      if (std::abs(s - 1.0) > kSumTol) throw InputError("Behaviour: table not normalized per question");
    }
}

QuestionSet::QuestionSet(std::vector<HermitianOperator> states) : states_(std::move(states)) {
  if (states_.empty()) throw InputError("QuestionSet: empty");
  for (const auto& s : states_) require_density(s, "QuestionSet state");
}

DistributedMeasurement build_distributed(const Povm& alice, const Povm& bob,
                                         const BipartiteState& rho) {
  if (alice.dims().size() != 2 || bob.dims().size() != 2)
    throw InputError("build_distributed: local POVMs must be bipartite (A,A') and (B',B)");
  const int da = alice.dims()[0], dap = alice.dims()[1];
  const int dbp = bob.dims()[0], db = bob.dims()[1];
  if (rho.dim_a() != dap || rho.dim_b() != dbp)
    throw InputError("build_distributed: shared state dims do not chain with the local POVMs");
  const std::vector<int> full = {da, dap, dbp, db};
  HermitianOperator rho_emb = insert_identities(rho.op(), full, {1, 2});
  std::vector<HermitianOperator> elems;
  elems.reserve(static_cast<size_t>(alice.outcomes()) * bob.outcomes());
  for (int a = 0; a < alice.outcomes(); ++a) {
    for (int b = 0; b < bob.outcomes(); ++b) {
      Matrix mm = kron(alice.element(a).matrix(), bob.element(b).matrix());
      Matrix prod = mm * rho_emb.matrix();
      Matrix red = partial_trace(prod, full, {0, 3});
      elems.emplace_back(std::vector<int>{da, db}, std::move(red));
    }
  }
  return DistributedMeasurement(alice.outcomes(), bob.outcomes(), std::move(elems),
                                Provenance{alice, bob, rho});
}

DistributedMeasurement build_free_distributed(const Povm& alice, const Povm& bob,
                                              const SeparableModel& sep) {
  if (alice.dims().size() != 2 || bob.dims().size() != 2)
    throw InputError("build_free_distributed: local POVMs must be bipartite");
  const int da = alice.dims()[0], dap = alice.dims()[1];
  const int dbp = bob.dims()[0], db = bob.dims()[1];
  if (sep.local_a().front().dim() != dap || sep.local_b().front().dim() != dbp)
    throw InputError("build_free_distributed: local state dims do not chain");
  std::vector<HermitianOperator> elems(static_cast<size_t>(alice.outcomes()) * bob.outcomes(),
                                       HermitianOperator::zero({da, db}));
  for (int l = 0; l < sep.terms(); ++l) {
    std::vector<HermitianOperator> ma, mb;
    for (int a = 0; a < alice.outcomes(); ++a) {
      HermitianOperator emb = insert_identities(sep.local_a()[l], {da, dap}, {1});
      Matrix red = partial_trace(alice.element(a).matrix() * emb.matrix(), {da, dap}, {0});
      ma.emplace_back(std::vector<int>{da}, std::move(red));
    }
    for (int b = 0; b < bob.outcomes(); ++b) {
      HermitianOperator emb = insert_identities(sep.local_b()[l], {dbp, db}, {0});
      Matrix red = partial_trace(bob.element(b).matrix() * emb.matrix(), {dbp, db}, {1});
      mb.emplace_back(std::vector<int>{db}, std::move(red));
    }
    for (int a = 0; a < alice.outcomes(); ++a)
      for (int b = 0; b < bob.outcomes(); ++b)
        elems[a * bob.outcomes() + b] += sep.weights()[l] * tensor(ma[a], mb[b]);
  }
  return DistributedMeasurement(alice.outcomes(), bob.outcomes(), std::move(elems),
                                Provenance{alice, bob, sep.assemble()});
}

Povm controlled_povm(const std::vector<Povm>& settings, Side side) {
  if (settings.empty()) throw InputError("controlled_povm: no settings");
  const int nset = static_cast<int>(settings.size());
  const auto& dims0 = settings.front().dims();
  const int outcomes = settings.front().outcomes();
  for (const auto& s : settings)
    if (s.dims() != dims0 || s.outcomes() != outcomes)
      throw InputError("controlled_povm: inhomogeneous settings");
  const int d = product_of_dims(dims0);
  std::vector<HermitianOperator> elems;
  for (int a = 0; a < outcomes; ++a) {
    if (side == Side::Alice) {
      Matrix m = Matrix::Zero(nset * d, nset * d);
      for (int x = 0; x < nset; ++x) m.block(x * d, x * d, d, d) = settings[x].element(a).matrix();
      elems.emplace_back(std::vector<int>{nset, d}, std::move(m));
    } else {
      Matrix m = Matrix::Zero(d * nset, d * nset);
      for (int y = 0; y < nset; ++y) {
        Matrix sel = Matrix::Zero(nset, nset);
        sel(y, y) = 1.0;
        m += kron(settings[y].element(a).matrix(), sel);
      }
      elems.emplace_back(std::vector<int>{d, nset}, std::move(m));
    }
  }
  return Povm(std::move(elems));
}

Behaviour behaviour(const DistributedMeasurement& m, const QuestionSet& qa, const QuestionSet& qb) {
  if (qa.states().front().dim() != m.dim_a() || qb.states().front().dim() != m.dim_b())
    throw InputError("behaviour: question dims do not match the measurement");
  std::vector<double> table(static_cast<size_t>(m.outcomes_a()) * m.outcomes_b() * qa.count() *
                            qb.count());
  for (int x = 0; x < qa.count(); ++x)
    for (int y = 0; y < qb.count(); ++y) {
      Matrix q = kron(qa.states()[x].matrix(), qb.states()[y].matrix());
      for (int a = 0; a < m.outcomes_a(); ++a)
        for (int b = 0; b < m.outcomes_b(); ++b)
          table[((x * qb.count() + y) * m.outcomes_a() + a) * m.outcomes_b() + b] =
              (m.element(a, b).matrix() * q).trace().real();
    }
  return Behaviour(m.outcomes_a(), m.outcomes_b(), qa.count(), qb.count(), std::move(table));
}

DistributedMeasurement simulate(const DistributedMeasurement& m, const SimulationSubroutine& s) {
  const int oi = m.outcomes_a(), oj = m.outcomes_b();
  const int oa = static_cast<int>(s.post_alice(0).rows());
  const int ob = static_cast<int>(s.post_bob(0).rows());
  if (product_of_dims(s.pre_alice(0).output_dims()) != m.dim_a() ||
      product_of_dims(s.pre_bob(0).output_dims()) != m.dim_b())
    throw InputError("simulate: channel output dims do not match the measurement");
  std::vector<int> out_dims = {product_of_dims(s.pre_alice(0).input_dims()),
                               product_of_dims(s.pre_bob(0).input_dims())};
  std::vector<HermitianOperator> elems(static_cast<size_t>(oa) * ob,
                                       HermitianOperator::zero(out_dims));
  for (int l = 0; l < s.terms(); ++l) {
    if (static_cast<int>(s.post_alice(l).cols()) != oi || static_cast<int>(s.post_bob(l).cols()) != oj)
      throw InputError("simulate: post-processing shape does not match outcome counts");
    auto pair_adj = LinearMapOnOperators::tensor_pair(s.pre_alice(l).adjoint(), s.pre_bob(l).adjoint());
    std::vector<HermitianOperator> mapped;
    mapped.reserve(static_cast<size_t>(oi) * oj);
    for (int i = 0; i < oi; ++i)
      for (int j = 0; j < oj; ++j)
        mapped.emplace_back(out_dims, pair_adj.apply(m.element(i, j)).matrix());
    for (int a = 0; a < oa; ++a)
      for (int b = 0; b < ob; ++b) {
        HermitianOperator acc = HermitianOperator::zero(out_dims);
        for (int i = 0; i < oi; ++i)
          for (int j = 0; j < oj; ++j) {
            const double w = s.weights()[l] * s.post_alice(l)(a, i) * s.post_bob(l)(b, j);
            if (w != 0.0) acc += w * mapped[i * oj + j];
          }
        elems[a * ob + b] += acc;
      }
  }
  return DistributedMeasurement(oa, ob, std::move(elems));
}

TeleportationInstrument teleportation_instrument(const Povm& alice, const BipartiteState& rho) {
  if (alice.dims().size() != 2) throw InputError("teleportation_instrument: POVM must act on (A, A')");
  const int da = alice.dims()[0], dap = alice.dims()[1];
  if (rho.dim_a() != dap) throw InputError("teleportation_instrument: state does not chain with POVM");
  const int dbp = rho.dim_b();
  const int dv = da;
  const std::vector<int> full = {dv, da, dap, dbp};
  HermitianOperator base = tensor(max_entangled(da), rho.op());
  std::vector<HermitianOperator> choi;
  for (int a = 0; a < alice.outcomes(); ++a) {
    HermitianOperator memb = insert_identities(alice.element(a), full, {1, 2});
    Matrix red = partial_trace(memb.matrix() * base.matrix(), full, {0, 3});
    choi.emplace_back(std::vector<int>{dv, dbp}, std::move(red));
  }
  return TeleportationInstrument(std::move(choi), std::make_pair(alice, rho));
}

Povm bell_measurement(int d) {
  auto us = heisenberg_weyl(d);
  auto phi = max_entangled(d);
  std::vector<HermitianOperator> elems;
  elems.reserve(us.size());
  for (const auto& u : us) {
    Matrix w = kron(Matrix::Identity(d, d), u);
    elems.emplace_back(std::vector<int>{d, d}, w * phi.matrix() * w.adjoint());
  }
  return Povm(std::move(elems));
}

BipartiteState isotropic_state(int d, double p) {
  if (p < 0.0 || p > 1.0) throw InputError("isotropic_state: p must be in [0,1]");
  HermitianOperator mixed = (1.0 - p) / (d * d) * HermitianOperator::identity({d, d});
  return BipartiteState(p * max_entangled(d) + mixed);
}

BipartiteState random_state(const std::vector<int>& dims, int rank, uint64_t seed) {
  if (dims.size() != 2) throw InputError("random_state: dims must be bipartite");
  const int n = product_of_dims(dims);
  if (rank < 1 || rank > n) throw InputError("random_state: invalid rank");
  Rng rng(seed);
  Matrix g(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = rng.cgauss();
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return BipartiteState(HermitianOperator(dims, rho));
}

Matrix random_unitary(int d, Rng& rng) {
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.cgauss();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const Complex rj = r(j, j);
    if (std::abs(rj) > 0) q.col(j) *= rj / std::abs(rj);
  }
  return q;
}

Povm random_povm(const std::vector<int>& dims, int outcomes, uint64_t seed) {
  const int d = product_of_dims(dims);
  if (outcomes < 1) throw InputError("random_povm: outcomes must be positive");
  Rng rng(seed);
  Matrix u = random_unitary(d * outcomes, rng);
  // The first d columns form an isometry; its row blocks give the elements.
  Matrix w = u.leftCols(d);
  std::vector<HermitianOperator> elems;
  for (int k = 0; k < outcomes; ++k) {
    Matrix blk = w.middleRows(k * d, d);
    elems.emplace_back(dims, Matrix(blk.adjoint() * blk));
  }
  return Povm(std::move(elems));
}

SeparableModel random_separable(const std::vector<int>& dims, int terms, uint64_t seed) {
  if (dims.size() != 2) throw InputError("random_separable: dims must be bipartite");
  Rng rng(seed);
  std::vector<double> w(terms);
  double s = 0.0;
  for (int l = 0; l < terms; ++l) {
    w[l] = -std::log(std::max(rng.uniform(), 1e-300));
    s += w[l];
  }
  for (double& v : w) v /= s;
  std::vector<HermitianOperator> la, lb;
  for (int l = 0; l < terms; ++l) {
    for (int side = 0; side < 2; ++side) {
      const int d = dims[side];
      Matrix g(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.cgauss();
      Matrix rho = g * g.adjoint();
      rho /= rho.trace().real();
      (side == 0 ? la : lb).emplace_back(std::vector<int>{d}, rho);
    }
  }
  return SeparableModel(std::move(w), std::move(la), std::move(lb));
}

SimulationSubroutine random_post_subroutine(int outcomes_a, int outcomes_b,
                                            const std::vector<int>& dims_a,
                                            const std::vector<int>& dims_b, int n_lambda,
                                            uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(n_lambda);
  double s = 0.0;
  for (int l = 0; l < n_lambda; ++l) {
    w[l] = -std::log(std::max(rng.uniform(), 1e-300));
    s += w[l];
  }
  for (double& v : w) v /= s;
  auto random_stochastic = [&](int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j) {
      double c = 0.0;
      for (int i = 0; i < rows; ++i) {
        m(i, j) = -std::log(std::max(rng.uniform(), 1e-300));
        c += m(i, j);
      }
      for (int i = 0; i < rows; ++i) m(i, j) /= c;
    }
    return m;
  };
  std::vector<Eigen::MatrixXd> pa, pb;
  std::vector<LinearMapOnOperators> ca, cb;
  for (int l = 0; l < n_lambda; ++l) {
    pa.push_back(random_stochastic(outcomes_a, outcomes_a));
    pb.push_back(random_stochastic(outcomes_b, outcomes_b));
    ca.push_back(LinearMapOnOperators::identity(dims_a));
    cb.push_back(LinearMapOnOperators::identity(dims_b));
  }
  return SimulationSubroutine(std::move(w), std::move(pa), std::move(pb), std::move(ca), std::move(cb));
}

SimulationSubroutine random_subroutine(int outcomes_a, int outcomes_b, const std::vector<int>& dims_a,
                                       const std::vector<int>& dims_b, int n_lambda, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(n_lambda);
  double s = 0.0;
  for (int l = 0; l < n_lambda; ++l) {
    w[l] = -std::log(std::max(rng.uniform(), 1e-300));
    s += w[l];
  }
  for (double& v : w) v /= s;
  auto random_stochastic = [&](int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j) {
      double c = 0.0;
      for (int i = 0; i < rows; ++i) {
        m(i, j) = -std::log(std::max(rng.uniform(), 1e-300));
        c += m(i, j);
      }
      for (int i = 0; i < rows; ++i) m(i, j) /= c;
    }
    return m;
  };
  std::vector<Eigen::MatrixXd> pa, pb;
  std::vector<LinearMapOnOperators> ca, cb;
  for (int l = 0; l < n_lambda; ++l) {
    pa.push_back(random_stochastic(outcomes_a, outcomes_a));
    pb.push_back(random_stochastic(outcomes_b, outcomes_b));
    ca.push_back(LinearMapOnOperators::unitary(random_unitary(product_of_dims(dims_a), rng), dims_a));
    cb.push_back(LinearMapOnOperators::unitary(random_unitary(product_of_dims(dims_b), rng), dims_b));
  }
  return SimulationSubroutine(std::move(w), std::move(pa), std::move(pb), std::move(ca), std::move(cb));
}

}  // namespace nlf
