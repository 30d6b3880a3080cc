#pragma once

namespace bwf {

/// Numeric tolerances shared across the library.
struct NumericConfig {
  /// Smallest admissible eigenvalue of an SPD matrix.
  double eig_floor = 1e-12;
  /// Relative symmetry tolerance: max |A_ij - A_ji| <= tol * (1 + max |A_ij|).
  double sym_rel_tol = 1e-10;
  /// Negative radicands above -radicand_tol are clamped to zero in bw_distance.
  double radicand_tol = 1e-10;
  /// Condition number beyond which a covariance matrix counts as singular.
  double condition_limit = 1e12;
  /// Smallest admissible eigenvalue of the plug-in Hessian operator.
  double operator_floor = 1e-10;
};

}  // namespace bwf
