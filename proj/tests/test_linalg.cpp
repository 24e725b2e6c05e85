#include "doctest.h"

#include "nlf/linalg.hpp"
#include "oracles.hpp"

using namespace nlf;

namespace {

HermitianOperator herm(const std::vector<int>& dims, const Matrix& m) {
  return HermitianOperator(dims, m);
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace

TEST_CASE("constructor enforces hermiticity and symmetrizes roundoff") {
  Matrix m(2, 2);
  m << 1.0, Complex(0.5, 1e-14), Complex(0.5, -1e-14 + 5e-13), 2.0;
  HermitianOperator h({2}, m);
  CHECK((h.matrix() - h.matrix().adjoint()).cwiseAbs().maxCoeff() == 0.0);

  Matrix bad(2, 2);
  bad << 1.0, 1.0, 0.0, 2.0;
  CHECK_THROWS_AS(HermitianOperator({2}, bad), InputError);
  CHECK_THROWS_AS(HermitianOperator({3}, Matrix::Identity(2, 2)), InputError);
}

TEST_CASE("tensor: identities, trace multiplicativity, index oracle") {
  auto i2 = HermitianOperator::identity({2});
  auto t = tensor(i2, i2);
  CHECK(t.dims() == std::vector<int>{2, 2});
  CHECK((t.matrix() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  auto a = herm({2}, oracle::random_hermitian(2, 11));
  auto b = herm({2}, oracle::random_hermitian(2, 12));
  CHECK(tensor(a, b).trace() == doctest::Approx(a.trace() * b.trace()).epsilon(1e-12));

  auto xz = tensor(herm({2}, pauli_x()), herm({2}, pauli_z()));
  CHECK((xz.matrix() - oracle::kron_indexsum(pauli_x(), pauli_z())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("partial_trace: product factorization, entangled marginal, index oracle") {
  auto ra = herm({2}, oracle::random_density(2, 21));
  auto rb = herm({3}, oracle::random_density(3, 22));
  auto prod = tensor(ra, rb);
  auto blk = partial_trace(prod, {0});
  CHECK((blk.matrix() - ra.matrix() * rb.trace()).cwiseAbs().maxCoeff() < 1e-12);

  auto phi = max_entangled(2);
  auto marg = partial_trace(phi, {0});
  CHECK((marg.matrix() - Matrix::Identity(2, 2) / 2).cwiseAbs().maxCoeff() < 1e-14);

  auto x = herm({2, 2}, oracle::random_hermitian(4, 23));
  auto got = partial_trace(x, {0});
  CHECK((got.matrix() - oracle::ptrace_second(x.matrix(), 2, 2)).cwiseAbs().maxCoeff() < 1e-13);
  auto got2 = partial_trace(x, {1});
  CHECK((got2.matrix() - oracle::ptrace_first(x.matrix(), 2, 2)).cwiseAbs().maxCoeff() < 1e-13);

  CHECK(partial_trace(x, {}).matrix()(0, 0).real() == doctest::Approx(x.trace()));

  // Nested traces collapse: tracing B then A equals tracing both at once.
  auto y = herm({2, 2, 2}, oracle::random_hermitian(8, 24));
  auto once = partial_trace(y, {0});
  auto twice = partial_trace(partial_trace(y, {0, 2}), {0});
  CHECK((once.matrix() - twice.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial_transpose: product case, involution, phi+ spectrum") {
  auto a = herm({2}, oracle::random_hermitian(2, 31));
  auto b = herm({2}, oracle::random_hermitian(2, 32));
  auto ab = tensor(a, b);
  auto pt = partial_transpose(ab, 1);
  CHECK((pt.matrix() - kron(a.matrix(), b.matrix().transpose())).cwiseAbs().maxCoeff() < 1e-13);

  auto x = herm({2, 2}, oracle::random_hermitian(4, 33));
  CHECK((partial_transpose(partial_transpose(x, 1), 1).matrix() - x.matrix()).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(x.trace() == doctest::Approx(partial_transpose(x, 0).trace()));

  // tr((PT x)^2) = tr(x^2)
  auto ptx = partial_transpose(x, 0);
  CHECK((ptx.matrix() * ptx.matrix()).trace().real() ==
        doctest::Approx((x.matrix() * x.matrix()).trace().real()).epsilon(1e-12));

  CHECK(min_eigenvalue(partial_transpose(max_entangled(2), 1)) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("permute and insert_identities round trips") {
  auto x = herm({2, 3}, oracle::random_hermitian(6, 41));
  auto swapped = permute_systems(x, {1, 0});
  CHECK(swapped.dims() == std::vector<int>{3, 2});
  CHECK((permute_systems(swapped, {1, 0}).matrix() - x.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(swapped.trace() == doctest::Approx(x.trace()));

  auto emb = insert_identities(x, {2, 2, 3}, {0, 2});
  CHECK(emb.dims() == std::vector<int>{2, 2, 3});
  CHECK(emb.trace() == doctest::Approx(2.0 * x.trace()));
  auto back = partial_trace(emb, {0, 2});
  CHECK((back.matrix() - 2.0 * x.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("max_entangled: entries, trace, transpose transfer identity") {
  auto phi = max_entangled(2);
  Matrix expect = Matrix::Zero(4, 4);
  expect(0, 0) = expect(0, 3) = expect(3, 0) = expect(3, 3) = 0.5;
  CHECK((phi.matrix() - expect).cwiseAbs().maxCoeff() == 0.0);
  CHECK(phi.trace() == doctest::Approx(1.0));

  Eigen::SelfAdjointEigenSolver<Matrix> es(phi.matrix());
  CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(1.0));  // rank one

  // (A (x) 1) phi = (1 (x) A^T) phi for arbitrary A.
  oracle::Rng r(42);
  Matrix a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = r.cgauss();
  auto phi3 = max_entangled(3);
  Matrix lhs = kron(a, Matrix::Identity(3, 3)) * phi3.matrix();
  Matrix rhs = kron(Matrix::Identity(3, 3), a.transpose()) * phi3.matrix();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("heisenberg_weyl: pauli case, orthogonality, twirl") {
  auto u2 = heisenberg_weyl(2);
  REQUIRE(u2.size() == 4);
  CHECK((u2[0] - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((u2[1] - pauli_z()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((u2[2] - pauli_x()).cwiseAbs().maxCoeff() < 1e-15);
  for (size_t a = 0; a < 4; ++a)
    for (size_t b = 0; b < 4; ++b) {
      const Complex ip = (u2[a].adjoint() * u2[b]).trace();
      CHECK(std::abs(ip - (a == b ? Complex(2, 0) : Complex(0, 0))) < 1e-13);
    }

  for (int d : {2, 3}) {
    auto us = heisenberg_weyl(d);
    CHECK(us.size() == static_cast<size_t>(d * d));
    for (const auto& u : us)
      CHECK((u.adjoint() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-13);
    Matrix rho = oracle::random_density(d, 50 + d);
    Matrix tw = Matrix::Zero(d, d);
    for (const auto& u : us) tw += u * rho * u.adjoint();
    tw /= static_cast<double>(d * d);
    CHECK((tw - Matrix::Identity(d, d) * (rho.trace() / static_cast<double>(d))).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("min_eigenvalue: diagonal case and bisection oracle") {
  CHECK(min_eigenvalue(HermitianOperator::identity({2, 2})) == doctest::Approx(1.0));

  Matrix d(2, 2);
  d << 3, 0, 0, -2;
  auto [val, vec] = min_eigenpair(herm({2}, d));
  CHECK(val == doctest::Approx(-2.0));
  CHECK(std::abs(vec(1)) == doctest::Approx(1.0));

  for (uint64_t seed : {61, 62, 63}) {
    Matrix x = oracle::random_hermitian(5, seed);
    CHECK(min_eigenvalue(herm({5}, x)) ==
          doctest::Approx(oracle::min_eig_bisection(x, 1e-10)).epsilon(1e-8));
  }
}

TEST_CASE("eigen_system phase convention is deterministic") {
  Matrix x = oracle::random_hermitian(4, 71);
  auto s1 = eigen_system(herm({4}, x));
  auto s2 = eigen_system(herm({4}, x));
  CHECK((s1.vectors - s2.vectors).cwiseAbs().maxCoeff() == 0.0);
  for (int c = 0; c < 4; ++c) {
    for (int r = 0; r < 4; ++r) {
      if (std::abs(s1.vectors(r, c)) > 1e-10) {
        CHECK(s1.vectors(r, c).imag() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(s1.vectors(r, c).real() > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("linear maps: identity, depolarizing, choi/kraus cross-check") {
  auto id = LinearMapOnOperators::identity({2});
  CHECK(id.trace_preserving());
  auto x = herm({2}, oracle::random_hermitian(2, 81));
  CHECK((id.apply(x).matrix() - x.matrix()).cwiseAbs().maxCoeff() == 0.0);

  auto dep = LinearMapOnOperators::depolarizing(2);
  auto rho = herm({2}, oracle::random_density(2, 82));
  CHECK((dep.apply(rho).matrix() - Matrix::Identity(2, 2) * (rho.trace() / 2.0)).cwiseAbs().maxCoeff() <
        1e-13);

  // Random 3-Kraus channel: applying through the Choi form agrees with Kraus.
  oracle::Rng r(83);
  std::vector<Matrix> ks;
  Matrix acc = Matrix::Zero(2, 2);
  for (int i = 0; i < 3; ++i) {
    Matrix k(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) k(a, b) = 0.3 * r.cgauss();
    ks.push_back(k);
    acc += k.adjoint() * k;
  }
  // Normalize to trace preserving via acc^{-1/2}.
  Eigen::SelfAdjointEigenSolver<Matrix> es(acc);
  Matrix isq = es.operatorInverseSqrt();
  for (auto& k : ks) k = k * isq;
  auto ch = LinearMapOnOperators::from_kraus(ks, {2}, {2});
  CHECK(ch.trace_preserving());
  auto via_choi = LinearMapOnOperators::from_choi(ch.choi(), {2}, {2});
  auto y = herm({2}, oracle::random_hermitian(2, 84));
  CHECK((ch.apply(y).matrix() - via_choi.apply(y).matrix()).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(ch.apply(herm({3}, Matrix::Identity(3, 3))), InputError);
}

TEST_CASE("adjoint map: unitary case, unitality, duality identity") {
  oracle::Rng r(91);
  Matrix g(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) g(i, j) = r.cgauss();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix u = qr.householderQ();
  auto um = LinearMapOnOperators::unitary(u, {2});
  auto x = herm({2}, oracle::random_hermitian(2, 92));
  CHECK((adjoint_map(um).apply(x).matrix() - u.adjoint() * x.matrix() * u).cwiseAbs().maxCoeff() <
        1e-13);

  auto dep = LinearMapOnOperators::depolarizing(2);
  auto one = HermitianOperator::identity({2});
  CHECK((adjoint_map(dep).apply(one).matrix() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  // tr(adj(m)[Y] X) = tr(Y m[X]) on 20 random pairs.
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto xx = herm({2}, oracle::random_hermitian(2, 100 + seed));
    auto yy = herm({2}, oracle::random_hermitian(2, 200 + seed));
    const double lhs = (adjoint_map(dep).apply(yy).matrix() * xx.matrix()).trace().real();
    const double rhs = (yy.matrix() * dep.apply(xx).matrix()).trace().real();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("trace preservation of apply over TP maps") {
  auto dep = LinearMapOnOperators::depolarizing(3);
  auto x = herm({3}, oracle::random_hermitian(3, 111));
  CHECK(dep.apply(x).trace() == doctest::Approx(x.trace()).epsilon(1e-10));
}

TEST_CASE("tensor associativity up to dims flattening") {
  auto a = herm({2}, oracle::random_hermitian(2, 121));
  auto b = herm({3}, oracle::random_hermitian(3, 122));
  auto c = herm({2}, oracle::random_hermitian(2, 123));
  auto left = tensor(tensor(a, b), c);
  auto right = tensor(a, tensor(b, c));
  CHECK(left.dims() == right.dims());
  CHECK((left.matrix() - right.matrix()).cwiseAbs().maxCoeff() < 1e-14);
}
