#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace nlf {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Thrown on malformed inputs (dimension mismatches, invariant violations).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Dense complex Hermitian matrix with subsystem-dimension metadata.
///
/// Subsystems are addressed positionally (0-based) through the dims list;
/// party labels are a convention of each call site. The constructor
/// symmetrizes (x + x^dag)/2 when the asymmetry is below 1e-12 and rejects
/// the input above that.
class HermitianOperator {
 public:
  HermitianOperator(std::vector<int> dims, Matrix entries);

  static HermitianOperator identity(std::vector<int> dims);
  static HermitianOperator zero(std::vector<int> dims);
  /// Scalar wrapped as a 1x1 block (used for conic scalar variables).
  static HermitianOperator scalar(double value);

  const std::vector<int>& dims() const { return dims_; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  int num_subsystems() const { return static_cast<int>(dims_.size()); }
  const Matrix& matrix() const { return mat_; }

  double trace() const { return mat_.trace().real(); }
  double max_abs() const { return mat_.cwiseAbs().maxCoeff(); }
  double frobenius_norm() const { return mat_.norm(); }

  HermitianOperator& operator+=(const HermitianOperator& rhs);
  HermitianOperator& operator-=(const HermitianOperator& rhs);
  HermitianOperator& operator*=(double s);

  friend HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b) {
    a += b;
    return a;
  }
  friend HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b) {
    a -= b;
    return a;
  }
  friend HermitianOperator operator*(double s, HermitianOperator a) {
    a *= s;
    return a;
  }

 private:
  std::vector<int> dims_;
  Matrix mat_;
};

int product_of_dims(const std::vector<int>& dims);

/// Kronecker product; dims concatenate.
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
Matrix kron(const Matrix& a, const Matrix& b);

/// Trace out every subsystem not listed in `keep` (0-based, strictly
/// increasing). An empty keep set yields a 1x1 scalar wrapper.
HermitianOperator partial_trace(const HermitianOperator& x, const std::vector<int>& keep);
Matrix partial_trace(const Matrix& m, const std::vector<int>& dims, const std::vector<int>& keep);

/// Transpose on one tensor factor.
HermitianOperator partial_transpose(const HermitianOperator& x, int subsystem);
Matrix partial_transpose(const Matrix& m, const std::vector<int>& dims, int subsystem);

/// Reorder tensor factors: result factor j is input factor order[j].
HermitianOperator permute_systems(const HermitianOperator& x, const std::vector<int>& order);

/// Embed into a larger space with identity factors: the operator's subsystems
/// occupy `positions` (0-based, increasing) of `full_dims`.
HermitianOperator insert_identities(const HermitianOperator& x, const std::vector<int>& full_dims,
                                    const std::vector<int>& positions);

/// Normalized maximally entangled projector (1/d) sum_ij |ii><jj| on d (x) d.
HermitianOperator max_entangled(int d);

/// Heisenberg-Weyl unitaries {X^j Z^k}, j,k = 0..d-1, enumerated j-major.
/// Pairwise trace-orthogonal: tr(U_a^dag U_b) = d delta_ab.
std::vector<Matrix> heisenberg_weyl(int d);

struct EigenSystem {
  RealVector values;  // ascending
  Matrix vectors;     // columns; phase fixed so the first nonzero component is real positive
};

/// Hermitian eigendecomposition with deterministic ordering and phases.
EigenSystem eigen_system(const HermitianOperator& x);
EigenSystem eigen_system(const Matrix& hermitian);

double min_eigenvalue(const HermitianOperator& x);
std::pair<double, Vector> min_eigenpair(const HermitianOperator& x);

/// Linear map on operators, stored as a Kraus list (Choi input is converted
/// on construction). Trace non-increasing by invariant; exact trace
/// preservation within 1e-10 is flagged.
class LinearMapOnOperators {
 public:
  static LinearMapOnOperators from_kraus(std::vector<Matrix> kraus, std::vector<int> input_dims,
                                         std::vector<int> output_dims);
  /// Choi operator on input (x) output, J = sum_ij |i><j| (x) L[|i><j|].
  static LinearMapOnOperators from_choi(const HermitianOperator& choi, std::vector<int> input_dims,
                                        std::vector<int> output_dims);
  static LinearMapOnOperators identity(std::vector<int> dims);
  /// Unitary conjugation U (.) U^dag.
  static LinearMapOnOperators unitary(const Matrix& u, std::vector<int> dims);
  static LinearMapOnOperators depolarizing(int d);

  const std::vector<Matrix>& kraus() const { return kraus_; }
  const std::vector<int>& input_dims() const { return input_dims_; }
  const std::vector<int>& output_dims() const { return output_dims_; }
  bool trace_preserving() const { return trace_preserving_; }

  HermitianOperator apply(const HermitianOperator& x) const;
  LinearMapOnOperators adjoint() const;
  HermitianOperator choi() const;

  /// Composition this after other: (this o other)[x] = this[other[x]].
  LinearMapOnOperators compose_after(const LinearMapOnOperators& other) const;
  /// Kronecker product map acting factor-wise on a bipartite operator.
  static LinearMapOnOperators tensor_pair(const LinearMapOnOperators& a, const LinearMapOnOperators& b);

 private:
  LinearMapOnOperators() = default;
  std::vector<Matrix> kraus_;
  std::vector<int> input_dims_;
  std::vector<int> output_dims_;
  bool trace_preserving_ = false;
};

HermitianOperator apply_map(const LinearMapOnOperators& m, const HermitianOperator& x);
LinearMapOnOperators adjoint_map(const LinearMapOnOperators& m);

}  // namespace nlf
