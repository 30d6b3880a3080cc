#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bwf/geometry.hpp"
#include "bwf/regression.hpp"

namespace bwf {

/// Second-moment matrices of the augmented covariate (1, x^T)^T. Only the
/// covariate block of the regularized version carries the ridge.
struct AugmentedMoments {
  Matrix vec_sigma_hat;      // (p+1) x (p+1)
  Matrix vec_sigma_hat_reg;  // (p+1) x (p+1), invertible for rho > 0
};

AugmentedMoments augmented_moments(const Dataset& data, const MomentEstimates& moments);

/// Plug-in CLT covariance at x.
struct CltEstimate {
  SymOperator xi_hat;      // n^{-1} sum_i vec(V_i) vec(V_i)^T
  SymOperator h_hat_inv;   // inverse of the plug-in Hessian on the symmetric subspace
  Matrix omega_hat;        // d^2 x d^2 sandwich covariance
  Matrix entry_variances;  // d x d; omega_hat diagonal per entry (column-major index map)
};

/// Plug-in estimate of the asymptotic covariance of sqrt(n) (Qhat(x) - Q*(x)).
/// Raises SingularOperator when the plug-in Hessian has an eigenvalue below
/// cfg.operator_floor on the symmetric subspace.
CltEstimate clt_covariance(const Vector& x, const Dataset& data, const RegressionFit& fit,
                           const MomentEstimates& moments, const NumericConfig& cfg = {});

/// Pointwise normal confidence interval for entry (i, j) of the fitted
/// matrix: Qhat_ij +- z_{(1+level)/2} sqrt(v_ij / n). Zero-variance entries
/// collapse to the point.
std::pair<double, double> confidence_interval(Eigen::Index i, Eigen::Index j, double level,
                                              const CltEstimate& clt, const RegressionFit& fit,
                                              Eigen::Index n);

struct TestComponents {
  double statistic = 0.0;
  std::vector<RegressionFit> per_sample_fits;  // fits at X_1, ..., X_n
  RegressionFit barycenter_fit;                // fit at X-bar
  SymOperator h_hat;                           // -n^{-1} sum_i dT_{Qhat(Xbar)}^{Q_i}
};

/// Wasserstein F-statistic
///   T = sum_i || H_hat (Qhat(X_i) - Qhat(Xbar)) ||_F^2.
/// All n+1 fits must converge; otherwise NonConvergence lists the failures.
TestComponents test_statistic(const Dataset& data, const MomentEstimates& moments,
                              const FitConfig& config = {});

/// Eigenvalues (descending) of n^{-1} sum_i vec(T_i - I) vec(T_i - I)^T with
/// T_i the transport map from the barycenter fit to Q_i. Tiny negatives are
/// clamped to zero; negatives below -1e-10 raise NumericalBreakdown.
Vector null_eigenvalues(const Dataset& data, const RegressionFit& bary,
                        const NumericConfig& cfg = {});

/// Seeded Monte-Carlo sample (sorted ascending) of sum_j lambda_j w_j with
/// w_j i.i.d. chi-square(p). Draws are keyed by (seed, draw, j), so scaling
/// the lambdas rescales the sample exactly.
std::vector<double> weighted_chisq_draws(const Vector& lambdas, int p_dof, int mc,
                                         std::uint64_t seed);

/// Empirical (1 - alpha) quantile of the weighted chi-square sample.
double weighted_chisq_quantile(const Vector& lambdas, int p_dof, double alpha, int mc,
                               std::uint64_t seed);

struct TestResult {
  double statistic = 0.0;
  Vector eigenvalues;  // estimated null eigenvalues, descending
  int p_dof = 0;
  double quantile = 0.0;
  double p_value = 1.0;
  bool reject = false;
  int mc_samples = 0;
  std::uint64_t seed = 0;
};

inline constexpr int kDefaultMcSamples = 200000;

/// Level-alpha test of no covariate effect. rho defaults to 1/n.
TestResult run_test(const Dataset& data, double alpha, const FitConfig& config = {},
                    int mc = kDefaultMcSamples, std::uint64_t seed = 0,
                    std::optional<double> rho = std::nullopt);

/// Same pipeline on sample-covariance surrogate responses; validates that
/// every response is numerically full-rank first (RankDeficientSurrogate).
TestResult estimated_covariance_test(const Dataset& surrogate_data, double alpha,
                                     const FitConfig& config = {}, int mc = kDefaultMcSamples,
                                     std::uint64_t seed = 0,
                                     std::optional<double> rho = std::nullopt);

}  // namespace bwf
