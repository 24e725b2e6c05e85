#include "nlf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nlf {

namespace {

constexpr double kHermTol = 1e-12;

std::string dims_to_string(const std::vector<int>& dims) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
  os << "]";
  return os.str();
}

// Row/column index <-> multi-index over dims, big-endian (first factor slowest).
std::vector<int> strides_of(const std::vector<int>& dims) {
  std::vector<int> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * dims[i + 1];
  return s;
}

}  // namespace

int product_of_dims(const std::vector<int>& dims) {
  int p = 1;
  for (int d : dims) {
    if (d <= 0) throw InputError("subsystem dimensions must be positive");
    p *= d;
  }
  return p;
}

HermitianOperator::HermitianOperator(std::vector<int> dims, Matrix entries)
    : dims_(std::move(dims)), mat_(std::move(entries)) {
  const int n = product_of_dims(dims_);
  if (mat_.rows() != n || mat_.cols() != n) {
    std::ostringstream os;
    os << "matrix size " << mat_.rows() << "x" << mat_.cols() << " does not match dims "
       << dims_to_string(dims_);
    throw InputError(os.str());
  }
  const double asym = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() / 2.0;
  if (asym > kHermTol) {
    std::ostringstream os;
    os << "matrix is not Hermitian: asymmetry " << asym << " exceeds " << kHermTol;
    throw InputError(os.str());
  }
  mat_ = ((mat_ + mat_.adjoint()) / 2.0).eval();
}

HermitianOperator HermitianOperator::identity(std::vector<int> dims) {
  const int n = product_of_dims(dims);
  return HermitianOperator(std::move(dims), Matrix::Identity(n, n));
}

HermitianOperator HermitianOperator::zero(std::vector<int> dims) {
  const int n = product_of_dims(dims);
  return HermitianOperator(std::move(dims), Matrix::Zero(n, n));
}

HermitianOperator HermitianOperator::scalar(double value) {
  Matrix m(1, 1);
  m(0, 0) = value;
  return HermitianOperator({1}, std::move(m));
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& rhs) {
  if (dims_ != rhs.dims_) throw InputError("operator sum: dims mismatch");
  mat_ += rhs.mat_;
  return *this;
}

HermitianOperator& HermitianOperator::operator-=(const HermitianOperator& rhs) {
  if (dims_ != rhs.dims_) throw InputError("operator difference: dims mismatch");
  mat_ -= rhs.mat_;
  return *this;
}

HermitianOperator& HermitianOperator::operator*=(double s) {
  mat_ *= s;
  return *this;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  std::vector<int> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return HermitianOperator(std::move(dims), kron(a.matrix(), b.matrix()));
}

Matrix partial_trace(const Matrix& m, const std::vector<int>& dims, const std::vector<int>& keep) {
  const int ns = static_cast<int>(dims.size());
  for (size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= ns) throw InputError("partial_trace: keep index out of range");
    if (i > 0 && keep[i] <= keep[i - 1]) throw InputError("partial_trace: keep must be strictly increasing");
  }
  std::vector<int> traced;
  for (int i = 0; i < ns; ++i)
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) traced.push_back(i);
  std::vector<int> kept_dims, traced_dims;
  for (int i : keep) kept_dims.push_back(dims[i]);
  for (int i : traced) traced_dims.push_back(dims[i]);
  const int nk = product_of_dims(kept_dims);
  const int nt = product_of_dims(traced_dims);
  const auto strides = strides_of(dims);
  const auto kstr = strides_of(kept_dims);
  const auto tstr = strides_of(traced_dims);
  auto full_index = [&](int k, int t) {
    int idx = 0;
    for (size_t i = 0; i < keep.size(); ++i) idx += ((k / kstr[i]) % kept_dims[i]) * strides[keep[i]];
    for (size_t i = 0; i < traced.size(); ++i) idx += ((t / tstr[i]) % traced_dims[i]) * strides[traced[i]];
    return idx;
  };
  Matrix out = Matrix::Zero(nk, nk);
  for (int r = 0; r < nk; ++r)
    for (int c = 0; c < nk; ++c) {
      Complex s = 0.0;
      for (int t = 0; t < nt; ++t) s += m(full_index(r, t), full_index(c, t));
      out(r, c) = s;
    }
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& x, const std::vector<int>& keep) {
  std::vector<int> kept_dims;
  for (int i : keep) {
    if (i < 0 || i >= x.num_subsystems()) throw InputError("partial_trace: keep index out of range");
    kept_dims.push_back(x.dims()[i]);
  }
  Matrix out = partial_trace(x.matrix(), x.dims(), keep);
  if (kept_dims.empty()) kept_dims = {1};
  return HermitianOperator(std::move(kept_dims), std::move(out));
}

Matrix partial_transpose(const Matrix& m, const std::vector<int>& dims, int subsystem) {
  const int ns = static_cast<int>(dims.size());
  if (subsystem < 0 || subsystem >= ns) throw InputError("partial_transpose: subsystem out of range");
  const auto strides = strides_of(dims);
  const int n = static_cast<int>(m.rows());
  Matrix out(n, n);
  for (int r = 0; r < n; ++r) {
    const int rs = (r / strides[subsystem]) % dims[subsystem];
    const int rbase = r - rs * strides[subsystem];
    for (int c = 0; c < n; ++c) {
      const int cs = (c / strides[subsystem]) % dims[subsystem];
      const int cbase = c - cs * strides[subsystem];
      out(rbase + cs * strides[subsystem], cbase + rs * strides[subsystem]) = m(r, c);
    }
  }
  return out;
}

HermitianOperator partial_transpose(const HermitianOperator& x, int subsystem) {
  return HermitianOperator(x.dims(), partial_transpose(x.matrix(), x.dims(), subsystem));
}

HermitianOperator permute_systems(const HermitianOperator& x, const std::vector<int>& order) {
  const auto& dims = x.dims();
  const int ns = static_cast<int>(dims.size());
  if (static_cast<int>(order.size()) != ns) throw InputError("permute_systems: order size mismatch");
  std::vector<bool> seen(ns, false);
  for (int o : order) {
    if (o < 0 || o >= ns || seen[o]) throw InputError("permute_systems: order is not a permutation");
    seen[o] = true;
  }
  std::vector<int> new_dims(ns);
  for (int j = 0; j < ns; ++j) new_dims[j] = dims[order[j]];
  const auto old_str = strides_of(dims);
  const auto new_str = strides_of(new_dims);
  const int n = x.dim();
  std::vector<int> map(n);
  for (int idx = 0; idx < n; ++idx) {
    int out = 0;
    for (int j = 0; j < ns; ++j) out += ((idx / old_str[order[j]]) % dims[order[j]]) * new_str[j];
    map[idx] = out;
  }
  Matrix out(n, n);
  const Matrix& m = x.matrix();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out(map[r], map[c]) = m(r, c);
  return HermitianOperator(std::move(new_dims), std::move(out));
}

HermitianOperator insert_identities(const HermitianOperator& x, const std::vector<int>& full_dims,
                                    const std::vector<int>& positions) {
  const auto& dims = x.dims();
  if (positions.size() != dims.size()) throw InputError("insert_identities: positions size mismatch");
  for (size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] < 0 || positions[i] >= static_cast<int>(full_dims.size()))
      throw InputError("insert_identities: position out of range");
    if (i > 0 && positions[i] <= positions[i - 1])
      throw InputError("insert_identities: positions must be strictly increasing");
    if (full_dims[positions[i]] != dims[i]) throw InputError("insert_identities: dim mismatch at position");
  }
  const int nf = product_of_dims(full_dims);
  const auto fstr = strides_of(full_dims);
  const auto xstr = strides_of(dims);

  std::vector<int> id_positions;
  for (int i = 0; i < static_cast<int>(full_dims.size()); ++i)
    if (std::find(positions.begin(), positions.end(), i) == positions.end()) id_positions.push_back(i);
  std::vector<int> id_dims;
  for (int i : id_positions) id_dims.push_back(full_dims[i]);
  const int nid = product_of_dims(id_dims);
  const auto idstr = strides_of(id_dims);

  auto full_index = [&](int k, int t) {
    int idx = 0;
    for (size_t i = 0; i < positions.size(); ++i) idx += ((k / xstr[i]) % dims[i]) * fstr[positions[i]];
    for (size_t i = 0; i < id_positions.size(); ++i) idx += ((t / idstr[i]) % id_dims[i]) * fstr[id_positions[i]];
    return idx;
  };

  Matrix out = Matrix::Zero(nf, nf);
  const Matrix& m = x.matrix();
  for (int r = 0; r < x.dim(); ++r)
    for (int c = 0; c < x.dim(); ++c) {
      if (m(r, c) == Complex(0.0, 0.0)) continue;
      for (int t = 0; t < nid; ++t) out(full_index(r, t), full_index(c, t)) = m(r, c);
    }
  return HermitianOperator(full_dims, std::move(out));
}

HermitianOperator max_entangled(int d) {
  if (d < 2) throw InputError("max_entangled: d must be >= 2");
  Matrix m = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i * d + i, j * d + j) = 1.0 / d;
  return HermitianOperator({d, d}, std::move(m));
}

std::vector<Matrix> heisenberg_weyl(int d) {
  if (d < 2) throw InputError("heisenberg_weyl: d must be >= 2");
  Matrix shift = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) shift((i + 1) % d, i) = 1.0;
  Matrix phase = Matrix::Zero(d, d);
  const double w = 2.0 * M_PI / d;
  for (int m = 0; m < d; ++m) phase(m, m) = Complex(std::cos(w * m), std::sin(w * m));
  std::vector<Matrix> out;
  out.reserve(d * d);
  Matrix xj = Matrix::Identity(d, d);
  for (int j = 0; j < d; ++j) {
    Matrix u = xj;
    for (int k = 0; k < d; ++k) {
      out.push_back(u);
      u = u * phase;
    }
    xj = shift * xj;
  }
  return out;
}

EigenSystem eigen_system(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen_system: decomposition failed");
  EigenSystem sys{es.eigenvalues(), es.eigenvectors()};
  // Lexicographic phase convention: first component above threshold made real positive.
  for (Eigen::Index c = 0; c < sys.vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < sys.vectors.rows(); ++r) {
      const Complex v = sys.vectors(r, c);
      if (std::abs(v) > 1e-10) {
        sys.vectors.col(c) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }
  return sys;
}

EigenSystem eigen_system(const HermitianOperator& x) { return eigen_system(x.matrix()); }

double min_eigenvalue(const HermitianOperator& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(x.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

std::pair<double, Vector> min_eigenpair(const HermitianOperator& x) {
  EigenSystem sys = eigen_system(x);
  return {sys.values(0), sys.vectors.col(0)};
}

LinearMapOnOperators LinearMapOnOperators::from_kraus(std::vector<Matrix> kraus,
                                                      std::vector<int> input_dims,
                                                      std::vector<int> output_dims) {
  const int din = product_of_dims(input_dims);
  const int dout = product_of_dims(output_dims);
  if (kraus.empty()) throw InputError("LinearMapOnOperators: empty Kraus list");
  Matrix acc = Matrix::Zero(din, din);
  for (const auto& k : kraus) {
    if (k.rows() != dout || k.cols() != din) throw InputError("Kraus operator shape mismatch");
    acc += k.adjoint() * k;
  }
  const double excess = (acc - Matrix::Identity(din, din)).cwiseAbs().maxCoeff();
  LinearMapOnOperators m;
  m.trace_preserving_ = excess <= 1e-10;
  if (!m.trace_preserving_) {
    // Trace non-increasing: sum K^dag K <= 1 within 1e-10.
    Eigen::SelfAdjointEigenSolver<Matrix> es(acc, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().maxCoeff() > 1.0 + 1e-10)
      throw InputError("LinearMapOnOperators: Kraus list is trace increasing");
  }
  m.kraus_ = std::move(kraus);
  m.input_dims_ = std::move(input_dims);
  m.output_dims_ = std::move(output_dims);
  return m;
}

LinearMapOnOperators LinearMapOnOperators::from_choi(const HermitianOperator& choi,
                                                     std::vector<int> input_dims,
                                                     std::vector<int> output_dims) {
  const int din = product_of_dims(input_dims);
  const int dout = product_of_dims(output_dims);
  if (choi.dim() != din * dout) throw InputError("Choi operator size mismatch");
  EigenSystem sys = eigen_system(choi);
  if (sys.values(0) < -1e-10) throw InputError("Choi operator is not PSD within 1e-10");
  std::vector<Matrix> kraus;
  for (Eigen::Index c = 0; c < sys.values.size(); ++c) {
    const double lam = sys.values(c);
    if (lam <= 1e-14) continue;
    Matrix k(dout, din);
    for (int i = 0; i < din; ++i)
      for (int o = 0; o < dout; ++o) k(o, i) = std::sqrt(lam) * sys.vectors(i * dout + o, c);
    kraus.push_back(std::move(k));
  }
  if (kraus.empty()) kraus.push_back(Matrix::Zero(dout, din));
  return from_kraus(std::move(kraus), std::move(input_dims), std::move(output_dims));
}

LinearMapOnOperators LinearMapOnOperators::identity(std::vector<int> dims) {
  const int d = product_of_dims(dims);
  return from_kraus({Matrix::Identity(d, d)}, dims, dims);
}

LinearMapOnOperators LinearMapOnOperators::unitary(const Matrix& u, std::vector<int> dims) {
  return from_kraus({u}, dims, dims);
}

LinearMapOnOperators LinearMapOnOperators::depolarizing(int d) {
  // Kraus set {U_a / d} over the Heisenberg-Weyl unitaries realizes X -> tr(X) 1/d.
  std::vector<Matrix> kraus;
  for (const auto& u : heisenberg_weyl(d)) kraus.push_back(u / static_cast<double>(d));
  return from_kraus(std::move(kraus), {d}, {d});
}

HermitianOperator LinearMapOnOperators::apply(const HermitianOperator& x) const {
  if (x.dim() != product_of_dims(input_dims_))
    throw InputError("apply_map: operator dimension does not match map input");
  Matrix out = Matrix::Zero(kraus_[0].rows(), kraus_[0].rows());
  for (const auto& k : kraus_) out += k * x.matrix() * k.adjoint();
  return HermitianOperator(output_dims_, std::move(out));
}

LinearMapOnOperators LinearMapOnOperators::adjoint() const {
  std::vector<Matrix> adj;
  adj.reserve(kraus_.size());
  for (const auto& k : kraus_) adj.push_back(k.adjoint());
  LinearMapOnOperators m;
  m.kraus_ = std::move(adj);
  m.input_dims_ = output_dims_;
  m.output_dims_ = input_dims_;
  m.trace_preserving_ = false;  // adjoint of a TP map is unital, not TP in general
  return m;
}

HermitianOperator LinearMapOnOperators::choi() const {
  const int din = product_of_dims(input_dims_);
  const int dout = product_of_dims(output_dims_);
  Matrix j = Matrix::Zero(din * dout, din * dout);
  for (const auto& k : kraus_) {
    // vec of K in input (x) output order: |v> = sum_i |i> (x) K|i>.
    Vector v(din * dout);
    for (int i = 0; i < din; ++i)
      for (int o = 0; o < dout; ++o) v(i * dout + o) = k(o, i);
    j += v * v.adjoint();
  }
  std::vector<int> dims = input_dims_;
  dims.insert(dims.end(), output_dims_.begin(), output_dims_.end());
  return HermitianOperator(std::move(dims), std::move(j));
}

LinearMapOnOperators LinearMapOnOperators::compose_after(const LinearMapOnOperators& other) const {
  if (product_of_dims(input_dims_) != product_of_dims(other.output_dims_))
    throw InputError("compose_after: dimension mismatch");
  std::vector<Matrix> kraus;
  kraus.reserve(kraus_.size() * other.kraus_.size());
  for (const auto& a : kraus_)
    for (const auto& b : other.kraus_) kraus.push_back(a * b);
  LinearMapOnOperators m;
  m.kraus_ = std::move(kraus);
  m.input_dims_ = other.input_dims_;
  m.output_dims_ = output_dims_;
  m.trace_preserving_ = trace_preserving_ && other.trace_preserving_;
  return m;
}

LinearMapOnOperators LinearMapOnOperators::tensor_pair(const LinearMapOnOperators& a,
                                                       const LinearMapOnOperators& b) {
  std::vector<Matrix> kraus;
  kraus.reserve(a.kraus_.size() * b.kraus_.size());
  for (const auto& ka : a.kraus_)
    for (const auto& kb : b.kraus_) kraus.push_back(kron(ka, kb));
  LinearMapOnOperators m;
  m.kraus_ = std::move(kraus);
  m.input_dims_ = a.input_dims_;
  m.input_dims_.insert(m.input_dims_.end(), b.input_dims_.begin(), b.input_dims_.end());
  m.output_dims_ = a.output_dims_;
  m.output_dims_.insert(m.output_dims_.end(), b.output_dims_.begin(), b.output_dims_.end());
  m.trace_preserving_ = a.trace_preserving_ && b.trace_preserving_;
  return m;
}

HermitianOperator apply_map(const LinearMapOnOperators& m, const HermitianOperator& x) {
  return m.apply(x);
}

LinearMapOnOperators adjoint_map(const LinearMapOnOperators& m) { return m.adjoint(); }

}  // namespace nlf
