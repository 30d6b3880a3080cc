#include "bwf/geometry.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace bwf {

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvec(const Vector& v, Eigen::Index d) {
  if (v.size() != d * d) raise(ErrorKind::DimensionMismatch, "unvec: size is not d^2");
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Matrix symmetric_subspace_basis(Eigen::Index d) {
  const Eigen::Index m = d * (d + 1) / 2;
  Matrix basis = Matrix::Zero(d * d, m);
  Eigen::Index col = 0;
  for (Eigen::Index k = 0; k < d; ++k) basis(k * d + k, col++) = 1.0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index l = 0; l < d; ++l) {
    for (Eigen::Index k = 0; k < l; ++k) {
      basis(l * d + k, col) = inv_sqrt2;
      basis(k * d + l, col) = inv_sqrt2;
      ++col;
    }
  }
  return basis;
}

Matrix symmetrizer_matrix(Eigen::Index d) {
  Matrix p = Matrix::Zero(d * d, d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      p(j * d + i, j * d + i) += 0.5;
      p(j * d + i, i * d + j) += 0.5;
    }
  }
  return p;
}

namespace {

// Eigendecomposition with PD enforcement.
Eigen::SelfAdjointEigenSolver<Matrix> spd_eigs(const Matrix& a, const NumericConfig& cfg,
                                               const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(a));
  if (solver.info() != Eigen::Success)
    raise(ErrorKind::NumericalBreakdown, std::string(what) + ": eigendecomposition failed");
  const double lmin = solver.eigenvalues().minCoeff();
  if (!(lmin > cfg.eig_floor))
    raise(ErrorKind::NotPositiveDefinite,
          std::string(what) + ": min eigenvalue " + std::to_string(lmin) + " <= eig_floor");
  return solver;
}

// Square root and eigendecomposition of S^{1/2} Q S^{1/2} in one place; this
// pair drives ot_map, dt_map and dt_operator.
struct TransportContext {
  Matrix s_sqrt;
  Matrix w;       // S^{1/2} V, V eigenvectors of S^{1/2} Q S^{1/2}
  Vector lambda;  // eigenvalues of S^{1/2} Q S^{1/2}
};

TransportContext transport_context(const Matrix& q, const Matrix& s, const NumericConfig& cfg,
                                   const char* what) {
  if (q.rows() != q.cols() || s.rows() != s.cols() || q.rows() != s.rows())
    raise(ErrorKind::DimensionMismatch, std::string(what) + ": dimension mismatch");
  TransportContext ctx;
  ctx.s_sqrt = sqrtm(s, cfg);
  const Matrix mid = symmetrized(ctx.s_sqrt * q * ctx.s_sqrt);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(mid);
  if (solver.info() != Eigen::Success)
    raise(ErrorKind::NumericalBreakdown, std::string(what) + ": eigendecomposition failed");
  ctx.lambda = solver.eigenvalues();
  // The product's eigenvalues live on the scale lambda(S) * lambda(Q), so
  // degeneracy is a relative statement here.
  const double floor_value = cfg.eig_floor * std::max(ctx.lambda.maxCoeff(), 0.0);
  if (!(ctx.lambda.minCoeff() > floor_value))
    raise(ErrorKind::NotPositiveDefinite,
          std::string(what) + ": S^{1/2} Q S^{1/2} is not positive definite");
  ctx.w = ctx.s_sqrt * solver.eigenvectors();
  return ctx;
}

}  // namespace

SpdMatrix::SpdMatrix(Matrix m, const NumericConfig& cfg) {
  if (m.rows() != m.cols() || m.rows() == 0)
    raise(ErrorKind::DimensionMismatch, "SpdMatrix: matrix must be square and non-empty");
  if (!m.allFinite()) raise(ErrorKind::InvalidArgument, "SpdMatrix: non-finite entries");
  if (!is_symmetric(m, cfg.sym_rel_tol))
    raise(ErrorKind::AsymmetricResponse, "SpdMatrix: matrix is not symmetric");
  m_ = symmetrized(m);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    raise(ErrorKind::NumericalBreakdown, "SpdMatrix: eigendecomposition failed");
  const double lmin = solver.eigenvalues().minCoeff();
  if (!(lmin > cfg.eig_floor))
    raise(ErrorKind::NotPositiveDefinite,
          "SpdMatrix: min eigenvalue " + std::to_string(lmin) + " <= eig_floor");
}

Matrix SymOperator::apply(const Matrix& h) const {
  if (h.rows() != dim || h.cols() != dim)
    raise(ErrorKind::DimensionMismatch, "SymOperator::apply: dimension mismatch");
  return unvec(m * vec(h), dim);
}

Vector SymOperator::symmetric_eigenvalues() const {
  const Matrix basis = symmetric_subspace_basis(dim);
  const Matrix restricted = symmetrized(basis.transpose() * m * basis);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(restricted, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    raise(ErrorKind::NumericalBreakdown, "SymOperator: eigendecomposition failed");
  return solver.eigenvalues();
}

Matrix sqrtm(const Matrix& a, const NumericConfig& cfg) {
  const auto solver = spd_eigs(a, cfg, "sqrtm");
  const Vector roots = solver.eigenvalues().cwiseSqrt();
  return symmetrized(solver.eigenvectors() * roots.asDiagonal() *
                     solver.eigenvectors().transpose());
}

double bw_distance_sq(const Matrix& a, const Matrix& b, const NumericConfig& cfg) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    raise(ErrorKind::DimensionMismatch, "bw_distance: dimension mismatch");
  const Matrix a_sqrt = sqrtm(a, cfg);
  const Matrix mid = symmetrized(a_sqrt * b * a_sqrt);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(mid, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    raise(ErrorKind::NumericalBreakdown, "bw_distance: eigendecomposition failed");
  // mid is PSD up to rounding; tiny negative eigenvalues are noise.
  const double cross = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  double radicand = a.trace() + b.trace() - 2.0 * cross;
  if (radicand < -cfg.radicand_tol)
    raise(ErrorKind::NumericalBreakdown,
          "bw_distance: radicand " + std::to_string(radicand) + " below tolerance");
  if (radicand < 0.0) radicand = 0.0;
  return radicand;
}

double bw_distance(const Matrix& a, const Matrix& b, const NumericConfig& cfg) {
  return std::sqrt(bw_distance_sq(a, b, cfg));
}

Matrix ot_map(const Matrix& q, const Matrix& s, const NumericConfig& cfg) {
  const TransportContext ctx = transport_context(q, s, cfg, "ot_map");
  // S^{1/2} (S^{1/2} Q S^{1/2})^{-1/2} S^{1/2} = W diag(1/sqrt(lambda)) W^T.
  const Vector inv_roots = ctx.lambda.cwiseSqrt().cwiseInverse();
  return symmetrized(ctx.w * inv_roots.asDiagonal() * ctx.w.transpose());
}

namespace {

Matrix dt_coefficients(const Vector& lambda) {
  const Eigen::Index d = lambda.size();
  const Vector roots = lambda.cwiseSqrt();
  Matrix c(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      c(i, j) = 1.0 / ((roots(i) + roots(j)) * roots(i) * roots(j));
  return c;
}

}  // namespace

Matrix dt_map(const Matrix& q, const Matrix& s, const Matrix& h, const NumericConfig& cfg) {
  if (h.rows() != q.rows() || h.cols() != q.cols())
    raise(ErrorKind::DimensionMismatch, "dt_map: direction dimension mismatch");
  const TransportContext ctx = transport_context(q, s, cfg, "dt_map");
  const Matrix hs = symmetrized(h);
  // dT_Q^S(H) = -W [ (W^T H W) o C ] W^T with C_ij = 1 / ((sqrt(l_i) +
  // sqrt(l_j)) sqrt(l_i l_j)); this folds Lambda^{-1/2} delta Lambda^{-1/2}
  // into one Hadamard factor.
  const Matrix c = dt_coefficients(ctx.lambda);
  const Matrix delta = ctx.w.transpose() * hs * ctx.w;
  return symmetrized(-ctx.w * delta.cwiseProduct(c) * ctx.w.transpose());
}

SymOperator dt_operator(const Matrix& q, const Matrix& s, const NumericConfig& cfg) {
  const TransportContext ctx = transport_context(q, s, cfg, "dt_operator");
  const Eigen::Index d = q.rows();
  const Matrix c = dt_coefficients(ctx.lambda);

  // Kronecker form: vec(dT(H)) = -(W (x) W) diag(vec C) (W (x) W)^T vec(H),
  // composed with the symmetrizer so columns match dt_map on the symmetrized
  // basis elements.
  Matrix kron(d * d, d * d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      kron.block(i * d, j * d, d, d) = ctx.w(i, j) * ctx.w;

  SymOperator op;
  op.dim = d;
  op.m = -kron * vec(c).asDiagonal() * kron.transpose();
  op.m = symmetrized(op.m * symmetrizer_matrix(d));
  return op;
}

Matrix w2_gradient(const Matrix& q, const Matrix& s, const NumericConfig& cfg) {
  return Matrix::Identity(q.rows(), q.cols()) - ot_map(q, s, cfg);
}

}  // namespace bwf
