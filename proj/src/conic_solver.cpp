#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "nlf/conic.hpp"

// Homogeneous self-dual embedding, primal-dual path following with
// Nesterov-Todd scaling over a product of complex-Hermitian PSD blocks.
// The modeling layer compiles to standard form
//     min <c,x>  s.t.  A x = b,  x in K
// with PSD+PPT variables expanded into a main block plus a partially
// transposed mirror block tied by an equality, free variables eliminated by
// column-pivoted QR, and linearly dependent rows removed by pivoted Cholesky
// of A A^T. Equality duals are reported in the minimization convention:
// sign * objective_weight - sum_i L_i^adj(Y_i) = Z in K^*.

namespace nlf::conic {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int svec_len(int n) { return n * n; }

void svec_into(const Matrix& x, double* out) {
  const int n = static_cast<int>(x.rows());
  int k = 0;
  for (int i = 0; i < n; ++i) out[k++] = x(i, i).real();
  const double s2 = std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      out[k++] = s2 * x(i, j).real();
      out[k++] = s2 * x(i, j).imag();
    }
}

Matrix smat(const double* v, int n) {
  Matrix x(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i) x(i, i) = v[k++];
  const double is2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double re = v[k++] * is2;
      const double im = v[k++] * is2;
      x(i, j) = Complex(re, im);
      x(j, i) = Complex(re, -im);
    }
  return x;
}

struct Block {
  int n = 0;
  int offset = 0;
  int len = 0;
  std::string var;      // owning variable ("" for synthesized mirror)
  bool mirror = false;  // PPT mirror block
  std::string source;   // mirrored variable
  std::vector<int> rows;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> a;  // rows x len
};

struct FreeCol {
  std::string var;
  int offset = 0;
  int len = 0;
  int n = 0;
};

struct Standard {
  std::vector<Block> blocks;
  std::vector<FreeCol> frees;
  int n_cone = 0;
  int n_free = 0;
  int m_rows = 0;

  MatrixXd a_cone;
  MatrixXd a_free;
  VectorXd b;
  VectorXd c_cone;
  VectorXd c_free;
  double obj_sign = 1.0;
  double constant = 0.0;

  struct RowGroup {
    std::string name;
    int offset;
    int len;
    int mat_n;
    std::vector<int> dims;
  };
  std::vector<RowGroup> row_groups;
};

Standard compile(const ConeProgram& p) {
  Standard sf;
  sf.obj_sign = p.objective().sense == Sense::Maximize ? -1.0 : 1.0;
  sf.constant = p.objective().constant;

  std::map<std::string, int> block_of;
  std::map<std::string, int> mirror_of;
  std::map<std::string, int> free_of;

  for (const auto& v : p.variables()) {
    const int n = product_of_dims(v.dims);
    if (v.cone == Cone::Free) {
      free_of[v.name] = static_cast<int>(sf.frees.size());
      sf.frees.push_back({v.name, sf.n_free, svec_len(n), n});
      sf.n_free += svec_len(n);
    } else {
      block_of[v.name] = static_cast<int>(sf.blocks.size());
      Block b;
      b.n = n;
      b.offset = sf.n_cone;
      b.len = svec_len(n);
      b.var = v.name;
      sf.blocks.push_back(b);
      sf.n_cone += svec_len(n);
      if (v.cone == Cone::PsdAndPpt) {
        mirror_of[v.name] = static_cast<int>(sf.blocks.size());
        Block mb;
        mb.n = n;
        mb.offset = sf.n_cone;
        mb.len = svec_len(n);
        mb.mirror = true;
        mb.source = v.name;
        sf.blocks.push_back(mb);
        sf.n_cone += svec_len(n);
      }
    }
  }

  int row = 0;
  for (const auto& e : p.equalities()) {
    const int n = e.rhs.dim();
    sf.row_groups.push_back({e.name, row, svec_len(n), n, e.rhs.dims()});
    row += svec_len(n);
  }
  for (const auto& v : p.variables()) {
    if (v.cone != Cone::PsdAndPpt) continue;
    const int n = product_of_dims(v.dims);
    sf.row_groups.push_back({"@ppt:" + v.name, row, svec_len(n), n, v.dims});
    row += svec_len(n);
  }
  sf.m_rows = row;

  sf.a_cone = MatrixXd::Zero(sf.m_rows, sf.n_cone);
  sf.a_free = MatrixXd::Zero(sf.m_rows, sf.n_free);
  sf.b = VectorXd::Zero(sf.m_rows);
  sf.c_cone = VectorXd::Zero(sf.n_cone);
  sf.c_free = VectorXd::Zero(sf.n_free);

  for (const auto& [name, w] : p.objective().weights) {
    const Variable& v = p.variable(name);
    const int n = product_of_dims(v.dims);
    std::vector<double> tmp(svec_len(n));
    svec_into(w.matrix(), tmp.data());
    if (v.cone == Cone::Free) {
      const auto& f = sf.frees[free_of[name]];
      for (int k = 0; k < f.len; ++k) sf.c_free(f.offset + k) += sf.obj_sign * tmp[k];
    } else {
      const auto& blk = sf.blocks[block_of[name]];
      for (int k = 0; k < blk.len; ++k) sf.c_cone(blk.offset + k) += sf.obj_sign * tmp[k];
    }
  }

  auto emit_term = [&](int row_offset, int row_len, int mat_n, const Term& t) {
    const Variable& v = p.variable(t.var);
    const int vn = product_of_dims(v.dims);
    std::vector<double> unit(svec_len(vn), 0.0);
    std::vector<double> col(row_len);
    const bool is_free = v.cone == Cone::Free;
    const int col_offset = is_free ? sf.frees[free_of.at(t.var)].offset : sf.blocks[block_of.at(t.var)].offset;
    for (int k = 0; k < svec_len(vn); ++k) {
      unit[k] = 1.0;
      HermitianOperator y(v.dims, smat(unit.data(), vn));
      unit[k] = 0.0;
      for (const auto& step : t.chain) y = step.apply(y);
      if (y.dim() != mat_n) throw InputError("constraint term dimension mismatch");
      svec_into(y.matrix(), col.data());
      for (int r = 0; r < row_len; ++r) {
        const double val = t.coeff * col[r];
        if (val == 0.0) continue;
        if (is_free)
          sf.a_free(row_offset + r, col_offset + k) += val;
        else
          sf.a_cone(row_offset + r, col_offset + k) += val;
      }
    }
  };

  size_t gi = 0;
  for (const auto& e : p.equalities()) {
    const auto& g = sf.row_groups[gi++];
    std::vector<double> rhs(g.len);
    svec_into(e.rhs.matrix(), rhs.data());
    for (int r = 0; r < g.len; ++r) sf.b(g.offset + r) = rhs[r];
    for (const auto& t : e.terms) emit_term(g.offset, g.len, g.mat_n, t);
  }
  for (const auto& v : p.variables()) {
    if (v.cone != Cone::PsdAndPpt) continue;
    const auto& g = sf.row_groups[gi++];
    emit_term(g.offset, g.len, g.mat_n, Term{v.name, 1.0, {MapStep::ptranspose(v.ppt_subsystem)}});
    const Block& mb = sf.blocks[mirror_of.at(v.name)];
    for (int k = 0; k < mb.len; ++k) sf.a_cone(g.offset + k, mb.offset + k) -= 1.0;
  }
  return sf;
}

// Pivoted Cholesky of A A^T; returns a maximal independent row set, ascending.
std::vector<int> independent_rows(const MatrixXd& a, double rel_tol) {
  const int m = static_cast<int>(a.rows());
  if (m == 0) return {};
  MatrixXd g = a * a.transpose();
  std::vector<int> perm(m);
  for (int i = 0; i < m; ++i) perm[i] = i;
  VectorXd d = g.diagonal();
  const double floor = rel_tol * std::max(1e-300, d.maxCoeff());
  MatrixXd l = MatrixXd::Zero(m, m);
  int rank = 0;
  for (int k = 0; k < m; ++k) {
    int piv = k;
    double best = d(perm[k]);
    for (int j = k + 1; j < m; ++j)
      if (d(perm[j]) > best) {
        best = d(perm[j]);
        piv = j;
      }
    if (best <= floor) break;
    std::swap(perm[k], perm[piv]);
    const int pk = perm[k];
    const double lkk = std::sqrt(best);
    l(pk, k) = lkk;
    for (int j = k + 1; j < m; ++j) {
      const int pj = perm[j];
      double v = g(pj, pk);
      for (int t = 0; t < k; ++t) v -= l(pj, t) * l(pk, t);
      l(pj, k) = v / lkk;
      d(pj) -= l(pj, k) * l(pj, k);
    }
    ++rank;
  }
  std::vector<int> rows(perm.begin(), perm.begin() + rank);
  std::sort(rows.begin(), rows.end());
  return rows;
}

struct Scaling {
  Matrix r;
  Matrix rinv;
  VectorXd lambda;
};

Matrix factor_psd(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(x);
  VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(std::max(ev(i), 1e-300));
  return es.eigenvectors() * ev.asDiagonal();
}

Scaling nt_scaling(const Matrix& x, const Matrix& s) {
  Matrix lx = factor_psd(x);
  Matrix ls = factor_psd(s);
  Eigen::JacobiSVD<Matrix> svd(ls.adjoint() * lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
  VectorXd sig = svd.singularValues();
  for (Eigen::Index i = 0; i < sig.size(); ++i) sig(i) = std::max(sig(i), 1e-150);
  VectorXd isqrt = sig.cwiseSqrt().cwiseInverse();
  Scaling sc;
  sc.r = lx * svd.matrixV() * isqrt.asDiagonal();
  sc.rinv = isqrt.asDiagonal() * svd.matrixU().adjoint() * ls.adjoint();
  sc.lambda = sig;
  return sc;
}

double max_step(const VectorXd& lambda, const Matrix& v) {
  const int n = static_cast<int>(v.rows());
  Matrix w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = v(i, j) / std::sqrt(lambda(i) * lambda(j));
  if (!w.allFinite()) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(w, Eigen::EigenvaluesOnly);
  const double mn = es.eigenvalues()(0);
  if (!std::isfinite(mn)) return 0.0;
  if (mn >= 0) return std::numeric_limits<double>::infinity();
  return -1.0 / mn;
}

}  // namespace

Solution solve(const ConeProgram& p, const SolveOptions& opts) {
  Solution out;
  Standard sf;
  try {
    sf = compile(p);
  } catch (const std::exception& ex) {
    out.status = SolveStatus::NumericalFailure;
    out.message = std::string("compile: ") + ex.what();
    return out;
  }

  const double tol = std::clamp(opts.tol, 1e-10, 1e-4);

  MatrixXd q1 = MatrixXd::Zero(sf.m_rows, 0), q2 = MatrixXd::Identity(sf.m_rows, sf.m_rows);
  VectorXd u = VectorXd::Zero(0);
  MatrixXd a_hat = sf.a_cone;
  VectorXd b_hat = sf.b;
  VectorXd c_hat = sf.c_cone;
  double shift = 0.0;
  Eigen::ColPivHouseholderQR<MatrixXd> fqr;
  int rf = 0;

  if (sf.n_free > 0) {
    fqr.setThreshold(1e-11);
    fqr.compute(sf.a_free);
    rf = static_cast<int>(fqr.rank());
    MatrixXd q = fqr.householderQ();
    q1 = q.leftCols(rf);
    q2 = q.rightCols(sf.m_rows - rf);
    MatrixXd rhat = MatrixXd(fqr.matrixR().topRows(rf).triangularView<Eigen::Upper>());
    VectorXd cp = fqr.colsPermutation().transpose() * sf.c_free;
    if (rf > 0) {
      VectorXd u0 =
          rhat.leftCols(rf).transpose().triangularView<Eigen::Lower>().solve(cp.head(rf));
      VectorXd resid = rhat.transpose() * u0 - cp;
      if (resid.cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, sf.c_free.cwiseAbs().maxCoeff())) {
        out.status = SolveStatus::Unbounded;
        out.message = "objective is unbounded along a free direction";
        return out;
      }
      u = u0;
    } else if (sf.c_free.cwiseAbs().maxCoeff() > 1e-11) {
      out.status = SolveStatus::Unbounded;
      out.message = "objective is unbounded along an unconstrained free variable";
      return out;
    }
    a_hat = q2.transpose() * sf.a_cone;
    b_hat = q2.transpose() * sf.b;
    c_hat = sf.c_cone - sf.a_cone.transpose() * (q1 * u);
    shift = rf > 0 ? u.dot(q1.transpose() * sf.b) : 0.0;
  }

  std::vector<int> kept = independent_rows(a_hat, 1e-13);
  if (static_cast<int>(kept.size()) < a_hat.rows()) {
    MatrixXd ak(kept.size(), a_hat.cols());
    VectorXd bk(kept.size());
    for (size_t i = 0; i < kept.size(); ++i) {
      ak.row(i) = a_hat.row(kept[i]);
      bk(i) = b_hat(kept[i]);
    }
    Eigen::LDLT<MatrixXd> gk((ak * ak.transpose()).eval());
    for (int r = 0; r < a_hat.rows(); ++r) {
      if (std::binary_search(kept.begin(), kept.end(), r)) continue;
      VectorXd w = gk.solve(ak * a_hat.row(r).transpose());
      const double b_resid = std::abs(b_hat(r) - w.dot(bk));
      if (b_resid > 1e-7 * std::max(1.0, b_hat.cwiseAbs().maxCoeff())) {
        out.status = SolveStatus::Infeasible;
        out.message = "inconsistent linearly dependent constraint rows";
        return out;
      }
    }
    a_hat = ak;
    b_hat = bk;
  } else {
    kept.resize(a_hat.rows());
    for (size_t i = 0; i < kept.size(); ++i) kept[i] = static_cast<int>(i);
  }
  const int m = static_cast<int>(a_hat.rows());
  const int n = sf.n_cone;

  std::vector<Block> blocks = sf.blocks;
  for (auto& blk : blocks) {
    blk.rows.clear();
    for (int r = 0; r < m; ++r) {
      bool nz = false;
      for (int k = 0; k < blk.len && !nz; ++k) nz = a_hat(r, blk.offset + k) != 0.0;
      if (nz) blk.rows.push_back(r);
    }
    blk.a.resize(blk.rows.size(), blk.len);
    for (size_t i = 0; i < blk.rows.size(); ++i)
      for (int k = 0; k < blk.len; ++k) blk.a(i, k) = a_hat(blk.rows[i], blk.offset + k);
  }

  double nu = 0.0;
  for (const auto& blk : blocks) nu += blk.n;

  VectorXd x = VectorXd::Zero(n), s = VectorXd::Zero(n), y = VectorXd::Zero(m);
  for (const auto& blk : blocks) {
    std::vector<double> e(blk.len, 0.0);
    svec_into(Matrix::Identity(blk.n, blk.n), e.data());
    for (int k = 0; k < blk.len; ++k) {
      x(blk.offset + k) = e[k];
      s(blk.offset + k) = e[k];
    }
  }
  double tau = 1.0, kappa = 1.0;

  const double bnorm = std::max(1.0, b_hat.norm());
  const double cnorm = std::max(1.0, c_hat.norm());

  auto extract = [&](SolveStatus status, const std::string& msg, int iters) {
    out.status = status;
    out.message = msg;
    out.iterations = iters;

    if (status == SolveStatus::Infeasible) {
      const double byt = b_hat.dot(y);
      if (m > 0 && byt > 0) {
        VectorXd y2 = VectorXd::Zero(q2.cols());
        for (size_t i = 0; i < kept.size(); ++i) y2(kept[i]) = y(i) / byt;
        VectorXd yfull = q2 * y2;
        for (const auto& g : sf.row_groups)
          out.equality_duals.emplace(g.name,
                                     HermitianOperator(g.dims, smat(yfull.data() + g.offset, g.mat_n)));
      }
      return;
    }
    if (status == SolveStatus::Unbounded) {
      const double scale = std::max(1e-300, -c_hat.dot(x));
      for (const auto& blk : blocks) {
        if (blk.mirror) continue;
        const Variable& v = p.variable(blk.var);
        Matrix xm = smat(x.data() + blk.offset, blk.n) / scale;
        out.primal.emplace(blk.var, HermitianOperator(v.dims, xm));
      }
      return;
    }

    const double t = tau > 1e-300 ? tau : 1.0;
    VectorXd xs = x / t;
    VectorXd ss = s / t;
    std::map<std::string, Matrix> mirror_duals;
    for (const auto& blk : blocks) {
      Matrix xm = smat(xs.data() + blk.offset, blk.n);
      Matrix sm = smat(ss.data() + blk.offset, blk.n);
      if (blk.mirror) {
        mirror_duals[blk.source] = sm;
        continue;
      }
      const Variable& v = p.variable(blk.var);
      out.primal.emplace(blk.var, HermitianOperator(v.dims, xm));
      out.cone_duals.emplace(blk.var, HermitianOperator(v.dims, sm));
    }
    for (const auto& [name, zm] : mirror_duals) {
      const Variable& v = p.variable(name);
      HermitianOperator zppt(v.dims, zm);
      HermitianOperator zmain = out.cone_duals.at(name);
      out.cone_duals.emplace(name + "@psd_part", zmain);
      out.cone_duals.emplace(name + "@ppt_part", zppt);
      out.cone_duals.erase(name);
      out.cone_duals.emplace(name, zmain + partial_transpose(zppt, v.ppt_subsystem));
    }

    VectorXd y2 = VectorXd::Zero(q2.cols());
    for (size_t i = 0; i < kept.size(); ++i) y2(kept[i]) = y(i) / t;
    VectorXd yfull = q2 * y2;
    if (u.size() > 0) yfull += q1 * u;
    for (const auto& g : sf.row_groups)
      out.equality_duals.emplace(g.name,
                                 HermitianOperator(g.dims, smat(yfull.data() + g.offset, g.mat_n)));

    if (sf.n_free > 0) {
      VectorXd rhs_free = sf.b - sf.a_cone * xs;
      VectorXd x1 = VectorXd::Zero(sf.n_free);
      if (rf > 0) {
        MatrixXd rhat = MatrixXd(fqr.matrixR().topRows(rf).triangularView<Eigen::Upper>());
        VectorXd qtb = q1.transpose() * rhs_free;
        VectorXd z = rhat.leftCols(rf).triangularView<Eigen::Upper>().solve(qtb);
        VectorXd xp = VectorXd::Zero(sf.n_free);
        xp.head(rf) = z;
        x1 = fqr.colsPermutation() * xp;
      }
      for (const auto& f : sf.frees) {
        const Variable& v = p.variable(f.var);
        out.primal.emplace(f.var, HermitianOperator(v.dims, smat(x1.data() + f.offset, f.n)));
      }
    }

    const double internal_primal = c_hat.dot(xs) + shift;
    const double internal_dual = b_hat.dot(y) / t + shift;
    out.objective_value = sf.obj_sign * internal_primal + sf.constant;
    out.dual_objective_value = sf.obj_sign * internal_dual + sf.constant;
    out.gap = std::abs(out.objective_value - out.dual_objective_value);
  };

  if (n == 0) {
    extract(SolveStatus::Optimal, "no cone variables", 0);
    return out;
  }

  const int nblocks = static_cast<int>(blocks.size());
  std::vector<Scaling> sc(nblocks);
  std::vector<Matrix> wfull(nblocks), vx_aff(nblocks), vs_aff(nblocks);

  // Best iterate by feasibility+gap merit, attached on failure.
  VectorXd best_x = x, best_y = y, best_s = s;
  double best_tau = tau, best_merit = std::numeric_limits<double>::infinity();

  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    VectorXd rx = -a_hat.transpose() * y - s + c_hat * tau;
    VectorXd ry = a_hat * x - b_hat * tau;
    const double rg = kappa + c_hat.dot(x) - b_hat.dot(y);
    const double mu = (x.dot(s) + tau * kappa) / (nu + 1.0);

    const double pres = (a_hat * (x / tau) - b_hat).norm() / bnorm;
    const double dres = (-a_hat.transpose() * (y / tau) - s / tau + c_hat).norm() / cnorm;
    const double pcost = c_hat.dot(x) / tau + shift;
    const double gap_abs = x.dot(s) / (tau * tau);
    const double merit = std::max({pres, dres, gap_abs / std::max(1.0, std::abs(pcost))});
    if (opts.verbose) {
      std::ostringstream os;
      os << "it " << it << " pres " << pres << " dres " << dres << " gap " << gap_abs << " tau "
         << tau << " kappa " << kappa << " mu " << mu << " rg " << rg;
      std::fprintf(stderr, "%s\n", os.str().c_str());
    }
    if (merit < best_merit) {
      best_merit = merit;
      best_x = x;
      best_y = y;
      best_s = s;
      best_tau = tau;
    }
    if (pres <= tol && dres <= tol && gap_abs <= tol * std::max(1.0, std::abs(pcost))) {
      extract(SolveStatus::Optimal, "converged", it);
      return out;
    }
    const double byt = b_hat.dot(y);
    if (byt > tol && tau <= 1e-4 * kappa) {
      const double pinf = (a_hat.transpose() * y + s).norm() / byt;
      if (pinf <= tol * cnorm) {
        extract(SolveStatus::Infeasible, "primal infeasibility certificate found", it);
        return out;
      }
    }
    const double ctx = -c_hat.dot(x);
    if (ctx > tol && tau <= 1e-4 * kappa) {
      const double dinf = (a_hat * x).norm() / ctx;
      if (dinf <= tol * bnorm) {
        extract(SolveStatus::Unbounded, "dual infeasibility certificate found", it);
        return out;
      }
    }

    for (int k = 0; k < nblocks; ++k) {
      const auto& blk = blocks[k];
      sc[k] = nt_scaling(smat(x.data() + blk.offset, blk.n), smat(s.data() + blk.offset, blk.n));
      wfull[k] = sc[k].r * sc[k].r.adjoint();
    }

    MatrixXd mmat = MatrixXd::Zero(m, m);
    for (int k = 0; k < nblocks; ++k) {
      const auto& blk = blocks[k];
      const int nr = static_cast<int>(blk.rows.size());
      if (nr == 0) continue;
      MatrixXd cw(nr, blk.len);
      std::vector<double> tmp(blk.len);
      for (int i = 0; i < nr; ++i) {
        Matrix um = smat(blk.a.row(i).data(), blk.n);
        Matrix wm = wfull[k] * um * wfull[k];
        svec_into(wm, tmp.data());
        for (int c = 0; c < blk.len; ++c) cw(i, c) = tmp[c];
      }
      MatrixXd contrib = cw * blk.a.transpose();
      for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nr; ++j) mmat(blk.rows[i], blk.rows[j]) += contrib(i, j);
    }
    mmat = ((mmat + mmat.transpose()) / 2.0).eval();

    Eigen::LDLT<MatrixXd> ldlt;
    auto refined_solve = [&](const VectorXd& rhs) {
      VectorXd sol = ldlt.solve(rhs);
      for (int pass = 0; pass < 2; ++pass) {
        VectorXd resid = rhs - mmat * sol;
        if (!resid.allFinite()) break;
        sol += ldlt.solve(resid);
      }
      return sol;
    };

    auto wdot = [&](const VectorXd& v) {
      VectorXd outv(n);
      std::vector<double> tmp;
      for (int k = 0; k < nblocks; ++k) {
        const auto& blk = blocks[k];
        Matrix um = smat(v.data() + blk.offset, blk.n);
        Matrix wm = wfull[k] * um * wfull[k];
        tmp.resize(blk.len);
        svec_into(wm, tmp.data());
        for (int c = 0; c < blk.len; ++c) outv(blk.offset + c) = tmp[c];
      }
      return outv;
    };

    const VectorXd wc = wdot(c_hat);
    const VectorXd awc = a_hat * wc;
    const VectorXd hvec = b_hat + awc;
    const double cwc = c_hat.dot(wc);
    const VectorXd wrx = wdot(rx);
    const VectorXd awrx = a_hat * wrx;
    const double cwrx = c_hat.dot(wrx);
    VectorXd uvec;

    struct Dir {
      VectorXd dx, dy, ds;
      double dtau = 0.0, dkappa = 0.0;
      bool finite() const {
        return dx.allFinite() && dy.allFinite() && ds.allFinite() && std::isfinite(dtau) &&
               std::isfinite(dkappa);
      }
    };
    auto newton = [&](double eta, double sigma, const std::vector<Matrix>* corr, double corr_tk) {
      Dir d;
      VectorXd rdr(n);
      std::vector<double> tmp;
      for (int k = 0; k < nblocks; ++k) {
        const auto& blk = blocks[k];
        Matrix dm = Matrix::Zero(blk.n, blk.n);
        for (int i = 0; i < blk.n; ++i)
          dm(i, i) = sigma * mu - sc[k].lambda(i) * sc[k].lambda(i);
        if (corr) dm -= (*corr)[k];
        Matrix dd(blk.n, blk.n);
        for (int i = 0; i < blk.n; ++i)
          for (int j = 0; j < blk.n; ++j)
            dd(i, j) = 2.0 * dm(i, j) / (sc[k].lambda(i) + sc[k].lambda(j));
        Matrix rr = sc[k].r * dd * sc[k].r.adjoint();
        tmp.resize(blk.len);
        svec_into(rr, tmp.data());
        for (int c = 0; c < blk.len; ++c) rdr(blk.offset + c) = tmp[c];
      }
      const double dtk = sigma * mu - tau * kappa - corr_tk;

      const VectorXd q1v = -eta * ry - a_hat * rdr + eta * awrx;
      const VectorXd vvec = refined_solve(q1v);

      const double num =
          -dtk / tau + (-eta * rg - c_hat.dot(rdr) + eta * cwrx) + (b_hat - awc).dot(vvec);
      const double den = -kappa / tau - (b_hat - awc).dot(uvec) - cwc;
      d.dtau = num / den;
      d.dy = uvec * d.dtau + vvec;
      d.ds = -a_hat.transpose() * d.dy + c_hat * d.dtau + eta * rx;
      d.dx = rdr - wdot(d.ds);
      d.dkappa = (dtk - kappa * d.dtau) / tau;
      return d;
    };

    auto step_bound = [&](const Dir& d, std::vector<Matrix>* vx_out, std::vector<Matrix>* vs_out) {
      double alpha = std::numeric_limits<double>::infinity();
      for (int k = 0; k < nblocks; ++k) {
        const auto& blk = blocks[k];
        Matrix vx = sc[k].rinv * smat(d.dx.data() + blk.offset, blk.n) * sc[k].rinv.adjoint();
        Matrix vs = sc[k].r.adjoint() * smat(d.ds.data() + blk.offset, blk.n) * sc[k].r;
        if (vx_out) (*vx_out)[k] = vx;
        if (vs_out) (*vs_out)[k] = vs;
        alpha = std::min(alpha, max_step(sc[k].lambda, vx));
        alpha = std::min(alpha, max_step(sc[k].lambda, vs));
      }
      if (d.dtau < 0) alpha = std::min(alpha, -tau / d.dtau);
      if (d.dkappa < 0) alpha = std::min(alpha, -kappa / d.dkappa);
      return alpha;
    };

    // Compute the predictor-corrector step, escalating a diagonal ridge on the
    // Schur complement when extreme conditioning near the optimum produces a
    // non-finite direction.
    Dir dir;
    double alpha = 0.0;
    bool ok = false;
    double ridge = 0.0;
    for (int attempt = 0; attempt < 5 && !ok; ++attempt) {
      MatrixXd mreg = mmat;
      if (ridge > 0) mreg.diagonal().array() += ridge;
      ldlt.compute(mreg);
      ridge = ridge == 0 ? 1e-14 * std::max(1.0, mmat.diagonal().maxCoeff()) : ridge * 1e4;
      if (ldlt.info() != Eigen::Success) continue;
      uvec = refined_solve(hvec);
      if (!uvec.allFinite()) continue;

      Dir aff = newton(1.0, 0.0, nullptr, 0.0);
      if (!aff.finite()) continue;
      const double alpha_aff = std::min(1.0, 0.9999 * step_bound(aff, &vx_aff, &vs_aff));
      const double mu_aff = ((x + alpha_aff * aff.dx).dot(s + alpha_aff * aff.ds) +
                             (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa)) /
                            (nu + 1.0);
      double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);
      sigma = std::clamp(sigma, 1e-8, 0.999);

      std::vector<Matrix> corr(nblocks);
      for (int k = 0; k < nblocks; ++k)
        corr[k] = (vx_aff[k] * vs_aff[k] + vs_aff[k] * vx_aff[k]) / 2.0;

      dir = newton(1.0 - sigma, sigma, &corr, aff.dtau * aff.dkappa);
      if (!dir.finite()) continue;
      alpha = std::min(1.0, 0.99 * step_bound(dir, nullptr, nullptr));
      ok = std::isfinite(alpha) && alpha > 1e-13;
    }
    if (!ok) {
      x = best_x;
      y = best_y;
      s = best_s;
      tau = best_tau;
      extract(SolveStatus::NumericalFailure, "step computation failed; best iterate attached", it);
      return out;
    }

    x += alpha * dir.dx;
    y += alpha * dir.dy;
    s += alpha * dir.ds;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;
    if (!x.allFinite() || !s.allFinite() || !std::isfinite(tau) || !std::isfinite(kappa)) {
      x = best_x;
      y = best_y;
      s = best_s;
      tau = best_tau;
      extract(SolveStatus::NumericalFailure, "iterate became non-finite; best iterate attached", it);
      return out;
    }
  }

  x = best_x;
  y = best_y;
  s = best_s;
  tau = best_tau;
  extract(SolveStatus::NumericalFailure, "iteration cap reached; best iterate attached", it);
  return out;
}

}  // namespace nlf::conic
