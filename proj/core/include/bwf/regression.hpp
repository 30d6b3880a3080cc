#pragma once

#include <functional>
#include <vector>

#include "bwf/geometry.hpp"

namespace bwf {

/// Paired Euclidean covariates and SPD matrix responses.
struct Dataset {
  Matrix covariates;                 // n x p
  std::vector<SpdMatrix> responses;  // n matrices, each d x d

  Eigen::Index n() const { return covariates.rows(); }
  Eigen::Index p() const { return covariates.cols(); }
  Eigen::Index d() const { return responses.empty() ? 0 : responses.front().dim(); }
};

/// Builds a dataset, validating every response as SPD and checking shapes.
Dataset make_dataset(Matrix covariates, const std::vector<Matrix>& responses,
                     const NumericConfig& cfg = {});

/// n >= 2, finite covariates, responses sharing one dimension.
void validate_dataset(const Dataset& data);

/// Default ridge, rho = 1/n.
double default_rho(const Dataset& data);

struct MomentEstimates {
  Vector mean;     // p
  Matrix cov_reg;  // p x p; empirical covariance (1/n normalization) + rho I
  double rho = 0.0;
};

/// Empirical mean and ridge-regularized covariance of the covariates.
/// With rho = 0 a covariance with condition number above cfg.condition_limit
/// raises SingularCovariance.
MomentEstimates empirical_moments(const Dataset& data, double rho, const NumericConfig& cfg = {});

/// Fréchet regression weights w_i = 1 + (x - mean)^T cov_reg^{-1} (X_i - mean).
/// Negative weights are kept; they are part of the estimator.
Vector weights(const Vector& x, const MomentEstimates& moments, const Dataset& data);

/// Weighted objective F(x, S) = n^{-1} sum_i w_i W^2(S, Q_i). May be negative.
double objective(const Vector& x, const Matrix& s, const Dataset& data,
                 const MomentEstimates& moments, const NumericConfig& cfg = {});

struct FitConfig {
  double eta = 1.0;
  int max_iters = 30;
  double eps = 1e-6;

  enum class Init { Identity, Mean, Custom };
  Init init = Init::Identity;
  Matrix custom_init;

  NumericConfig numeric;
};

struct RegressionFit {
  SpdMatrix estimate;
  /// || n^{-1} sum_i w_i (T_S^{Q_i} - I) ||_F at the returned estimate
  /// (step-size independent).
  double grad_norm = 0.0;
  int iters = 0;
  bool converged = false;
  /// Iterations whose spectrum had to be floored at eig_floor.
  int clamped_steps = 0;
};

/// Iterate monitor, called once per iteration before the update.
using FitMonitor = std::function<void(int iter, const Matrix& s, double grad_norm)>;

/// Riemannian gradient descent for the Fréchet regression estimate at x:
///   G = I + eta * n^{-1} sum_i w_i (T_S^{Q_i} - I),  S <- G S G,
/// stopping when ||G - I||_F < eps (the gradient-residual reading of the
/// termination test; ||G||_F itself tends to ||I||_F at a fixed point).
RegressionFit fit(const Vector& x, const Dataset& data, const MomentEstimates& moments,
                  const FitConfig& config = {}, const FitMonitor& monitor = nullptr);

/// Fit at x = X-bar; all weights equal one, so this is the Fréchet mean of
/// the responses.
RegressionFit barycenter(const Dataset& data, const MomentEstimates& moments,
                         const FitConfig& config = {});

}  // namespace bwf
