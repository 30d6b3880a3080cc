#pragma once

#include <Eigen/Dense>

#include "bwf/errors.hpp"
#include "bwf/numeric_config.hpp"

namespace bwf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// (A + A^T) / 2.
Matrix symmetrized(const Matrix& a);

/// max |A_ij - A_ji| <= rel_tol * (1 + max |A_ij|).
bool is_symmetric(const Matrix& a, double rel_tol = 1e-10);

/// Column-major vectorization of a matrix into R^{d^2}.
Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, Eigen::Index d);

/// Orthonormal basis of the symmetric subspace of R^{d^2}: columns are
/// vec(E_kk) and (vec(E_kl) + vec(E_lk)) / sqrt(2), d(d+1)/2 in total.
Matrix symmetric_subspace_basis(Eigen::Index d);

/// d^2 x d^2 symmetrizer P with P vec(A) = vec((A + A^T)/2).
Matrix symmetrizer_matrix(Eigen::Index d);

/// Validated symmetric positive-definite matrix. The stored matrix is
/// symmetrized; construction fails if the input is materially asymmetric or
/// has an eigenvalue at or below eig_floor.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(Matrix m, const NumericConfig& cfg = {});

  const Matrix& mat() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

/// Linear operator on symmetric d x d matrices stored as a d^2 x d^2 matrix
/// acting on column-major vectorized inputs.
struct SymOperator {
  Eigen::Index dim = 0;
  Matrix m;

  /// Applies the operator to a matrix (symmetrizing is up to the operator).
  Matrix apply(const Matrix& h) const;

  /// Eigenvalues of the restriction to the symmetric subspace, ascending.
  Vector symmetric_eigenvalues() const;
};

/// Principal square root of an SPD matrix via symmetric eigendecomposition.
Matrix sqrtm(const Matrix& a, const NumericConfig& cfg = {});

/// Bures-Wasserstein distance
///   W(A, B) = [tr A + tr B - 2 tr((A^{1/2} B A^{1/2})^{1/2})]^{1/2}.
double bw_distance(const Matrix& a, const Matrix& b, const NumericConfig& cfg = {});
double bw_distance_sq(const Matrix& a, const Matrix& b, const NumericConfig& cfg = {});

/// Optimal transport map pushing N(0, Q) to N(0, S):
///   T_Q^S = S^{1/2} (S^{1/2} Q S^{1/2})^{-1/2} S^{1/2}.
Matrix ot_map(const Matrix& q, const Matrix& s, const NumericConfig& cfg = {});

/// Directional derivative of Q -> T_Q^S along the symmetric direction H,
/// evaluated from the eigendecomposition of S^{1/2} Q S^{1/2}. Non-symmetric
/// H is symmetrized first.
Matrix dt_map(const Matrix& q, const Matrix& s, const Matrix& h, const NumericConfig& cfg = {});

/// Matrix representation of H -> dt_map(q, s, H). Columns are generated by
/// the symmetrized basis elements, so the antisymmetric subspace maps to
/// zero and the operator is self-adjoint and negative semi-definite on the
/// symmetric subspace.
SymOperator dt_operator(const Matrix& q, const Matrix& s, const NumericConfig& cfg = {});

/// Frobenius gradient of W^2(., S) at Q: I - T_Q^S.
Matrix w2_gradient(const Matrix& q, const Matrix& s, const NumericConfig& cfg = {});

}  // namespace bwf
