#include <doctest.h>

#include <cmath>

#include <bwf/geometry.hpp>
#include <bwf/rng.hpp>

#include "test_support.hpp"

using namespace bwf;
using bwf_test::random_spd;
using bwf_test::random_symmetric;
using bwf_test::rel_error;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("sqrtm identity and diagonal cases") {
  CHECK(rel_error(sqrtm(Matrix::Identity(2, 2)), Matrix::Identity(2, 2)) < 1e-14);

  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << 4.0, 9.0;
  Matrix expected = Matrix::Zero(2, 2);
  expected.diagonal() << 2.0, 3.0;
  CHECK(rel_error(sqrtm(a), expected) < 1e-14);
}

TEST_CASE("sqrtm squares back to the input") {
  StreamRng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = random_spd(5, rng);
    const Matrix root = sqrtm(a);
    CHECK(rel_error(root * root, a) < 1e-10);
    CHECK(is_symmetric(root));
  }
}

TEST_CASE("sqrtm rejects non-positive-definite input") {
  Matrix a = Matrix::Identity(2, 2);
  a(1, 1) = -0.5;
  CHECK_THROWS_AS(sqrtm(a), Error);
  try {
    sqrtm(a);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPositiveDefinite);
  }
}

TEST_CASE("bw_distance basic values") {
  StreamRng rng(12);
  const Matrix a = random_spd(3, rng);
  // The radicand cancels to rounding noise for identical inputs, so the
  // distance floor is sqrt(eps)-sized.
  CHECK(bw_distance(a, a) < 1e-7);

  // Commuting case: W(A, B) = ||sqrt(A) - sqrt(B)||_F.
  const Matrix eye = Matrix::Identity(2, 2);
  CHECK(bw_distance(eye, 4.0 * eye) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("bw_distance dimension mismatch") {
  CHECK_THROWS_AS(bw_distance(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), Error);
}

TEST_CASE("bw_distance scaling and rotation invariance") {
  StreamRng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = random_spd(4, rng);
    const Matrix b = random_spd(4, rng);
    const Matrix o = haar_orthogonal(4, rng);
    const double c = rng.uniform(0.1, 5.0);
    const double base = bw_distance(a, b);

    CHECK(std::abs(bw_distance(c * a, c * b) - std::sqrt(c) * base) <= 1e-10 * base);
    CHECK(std::abs(bw_distance(o * a * o.transpose(), o * b * o.transpose()) - base) <=
          1e-10 * base);
  }
}

TEST_CASE("bw_distance symmetry and triangle inequality") {
  StreamRng rng(14);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = random_spd(3, rng);
    const Matrix b = random_spd(3, rng);
    const Matrix c = random_spd(3, rng);
    CHECK(std::abs(bw_distance(a, b) - bw_distance(b, a)) < 1e-9);
    CHECK(bw_distance(a, c) <= bw_distance(a, b) + bw_distance(b, c) + 1e-9);
  }
}

TEST_CASE("ot_map identity and commuting cases") {
  StreamRng rng(15);
  const Matrix q = random_spd(4, rng);
  CHECK(rel_error(ot_map(q, q), Matrix::Identity(4, 4)) < 1e-12);

  Matrix s = Matrix::Zero(2, 2);
  s.diagonal() << 4.0, 9.0;
  Matrix expected = Matrix::Zero(2, 2);
  expected.diagonal() << 2.0, 3.0;
  CHECK(rel_error(ot_map(Matrix::Identity(2, 2), s), expected) < 1e-13);
}

TEST_CASE("ot_map pushforward and inverse identities") {
  StreamRng rng(16);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix q = random_spd(5, rng);
    const Matrix s = random_spd(5, rng);
    const Matrix t = ot_map(q, s);
    CHECK(rel_error(t * q * t, s) < 1e-8);
    CHECK(rel_error(ot_map(s, q), t.inverse()) < 1e-8);
  }
}

TEST_CASE("dt_map identity case equals -H/2") {
  StreamRng rng(17);
  const Matrix h = random_symmetric(4, rng);
  const Matrix eye = Matrix::Identity(4, 4);
  CHECK(rel_error(dt_map(eye, eye, h), -0.5 * h) < 1e-12);
  CHECK(dt_map(eye, eye, Matrix::Zero(4, 4)).norm() == 0.0);
}

TEST_CASE("dt_map matches central finite differences") {
  StreamRng rng(18);
  const double h_step = 1e-5;
  for (int d = 2; d <= 6; ++d) {
    const Matrix q = random_spd(d, rng);
    const Matrix s = random_spd(d, rng);
    const Matrix h = random_symmetric(d, rng);
    const Matrix fd = (ot_map(q + h_step * h, s) - ot_map(q - h_step * h, s)) / (2.0 * h_step);
    CHECK(rel_error(dt_map(q, s, h), fd) < 1e-5);
  }
}

TEST_CASE("dt_map linearity and symmetrization of the direction") {
  StreamRng rng(19);
  const Matrix q = random_spd(3, rng);
  const Matrix s = random_spd(3, rng);
  const Matrix h1 = random_symmetric(3, rng);
  const Matrix h2 = random_symmetric(3, rng);
  const Matrix combo = dt_map(q, s, 2.0 * h1 - 3.0 * h2);
  const Matrix parts = 2.0 * dt_map(q, s, h1) - 3.0 * dt_map(q, s, h2);
  CHECK(rel_error(combo, parts) < 1e-10);

  Matrix nonsym(3, 3);
  nonsym << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  CHECK(rel_error(dt_map(q, s, nonsym), dt_map(q, s, symmetrized(nonsym))) < 1e-14);
}

TEST_CASE("dt_map is negative semi-definite as a form") {
  StreamRng rng(20);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix q = random_spd(4, rng);
    const Matrix s = random_spd(4, rng);
    const Matrix x = random_symmetric(4, rng);
    const double form = (dt_map(q, s, x).array() * x.array()).sum();
    CHECK(form <= 1e-10);
  }
}

TEST_CASE("dt_operator identity case is the scaled symmetrizer") {
  const Matrix eye = Matrix::Identity(3, 3);
  const SymOperator op = dt_operator(eye, eye);
  CHECK(rel_error(op.m, -0.5 * symmetrizer_matrix(3)) < 1e-12);
}

TEST_CASE("dt_operator matches dt_map and is self-adjoint") {
  StreamRng rng(21);
  const Matrix q = random_spd(4, rng);
  const Matrix s = random_spd(4, rng);
  const SymOperator op = dt_operator(q, s);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix x = random_symmetric(4, rng);
    const Matrix y = random_symmetric(4, rng);
    CHECK(rel_error(op.apply(x), dt_map(q, s, x)) < 1e-12);
    const double lhs = (op.apply(x).array() * y.array()).sum();
    const double rhs = (x.array() * op.apply(y).array()).sum();
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("dt_operator two-sided eigenvalue bound") {
  // <-dT(X), X> in [lmin^{1/2}/2, lmax^{1/2}/2] * ||Q^{-1/2} X Q^{-1/2}||_F^2
  // with the eigenvalues taken from S^{1/2} Q S^{1/2}.
  StreamRng rng(22);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix q = random_spd(3, rng);
    const Matrix s = random_spd(3, rng);
    const Matrix x = random_symmetric(3, rng);

    const Matrix s_root = sqrtm(s);
    Eigen::SelfAdjointEigenSolver<Matrix> mid(symmetrized(s_root * q * s_root));
    const double lo = std::sqrt(mid.eigenvalues().minCoeff()) / 2.0;
    const double hi = std::sqrt(mid.eigenvalues().maxCoeff()) / 2.0;

    const Matrix q_inv_root = sqrtm(q).inverse();
    const double weight = (q_inv_root * x * q_inv_root).squaredNorm();
    const double form = -(dt_map(q, s, x).array() * x.array()).sum();
    CHECK(form >= lo * weight * (1.0 - 1e-9));
    CHECK(form <= hi * weight * (1.0 + 1e-9));
  }
}

TEST_CASE("w2_gradient basic and finite-difference checks") {
  StreamRng rng(23);
  const Matrix q = random_spd(4, rng);
  CHECK(w2_gradient(q, q).norm() < 1e-12);

  const Matrix eye = Matrix::Identity(2, 2);
  CHECK(rel_error(w2_gradient(eye, 4.0 * eye), -eye) < 1e-13);

  const double h_step = 1e-5;
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix a = random_spd(4, rng);
    const Matrix s = random_spd(4, rng);
    const Matrix h = random_symmetric(4, rng);
    const double directional = (w2_gradient(a, s).array() * h.array()).sum();
    const double fd =
        (bw_distance_sq(a + h_step * h, s) - bw_distance_sq(a - h_step * h, s)) / (2.0 * h_step);
    CHECK(std::abs(directional - fd) <= 1e-5 * (1.0 + std::abs(fd)));
  }
}

TEST_CASE("squared distance is bracketed by Frobenius multiples") {
  // Lower multiple carries lmin(Q0) lmax(Q0)^{-2}, the upper one the
  // reciprocal pair.
  StreamRng rng(24);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix q0 = random_spd(3, rng);
    const Matrix q1 = random_spd(3, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> e0(q0);
    Eigen::SelfAdjointEigenSolver<Matrix> e1(q1);
    const double l0min = e0.eigenvalues().minCoeff();
    const double l0max = e0.eigenvalues().maxCoeff();
    const double l1min = e1.eigenvalues().minCoeff();
    const double l1max = e1.eigenvalues().maxCoeff();

    const double gap = (q1 - q0).squaredNorm();
    const double w2 = bw_distance_sq(q0, q1);
    const double lower = 0.5 * (l0min / (l0max * l0max)) / (1.0 + l1max / l0min) * gap;
    const double upper = (l0max / (l0min * l0min)) / (1.0 + l1min / l0max) * gap;
    CHECK(w2 >= lower * (1.0 - 1e-9));
    CHECK(w2 <= upper * (1.0 + 1e-9));
  }
}

TEST_CASE("SpdMatrix validates symmetry and positive definiteness") {
  Matrix asym(2, 2);
  asym << 1.0, 0.5, 0.2, 1.0;
  CHECK_THROWS_AS(SpdMatrix{asym}, Error);

  Matrix indefinite = Matrix::Identity(2, 2);
  indefinite(0, 0) = -1.0;
  CHECK_THROWS_AS(SpdMatrix{indefinite}, Error);

  StreamRng rng(25);
  const Matrix good = random_spd(3, rng);
  CHECK(SpdMatrix{good}.dim() == 3);
}

TEST_CASE("vectorization helpers") {
  StreamRng rng(26);
  const Matrix a = random_symmetric(3, rng);
  CHECK(rel_error(unvec(vec(a), 3), a) == 0.0);

  const Matrix basis = symmetric_subspace_basis(4);
  CHECK(rel_error(basis.transpose() * basis, Matrix::Identity(10, 10)) < 1e-14);

  // Column-major convention: vec stacks columns.
  Matrix m(2, 2);
  m << 1, 3, 2, 4;
  const Vector v = vec(m);
  CHECK(v(0) == 1.0);
  CHECK(v(1) == 2.0);
  CHECK(v(2) == 3.0);
  CHECK(v(3) == 4.0);
}

TEST_SUITE_END();
