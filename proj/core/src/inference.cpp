#include "bwf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "accumulate.hpp"
#include "bwf/parallel.hpp"
#include "bwf/rng.hpp"
#include "bwf/stats.hpp"

namespace bwf {

AugmentedMoments augmented_moments(const Dataset& data, const MomentEstimates& moments) {
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  AugmentedMoments out;

  detail::KahanMatrixSum sum(p + 1, p + 1);
  Vector xi(p + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    xi(0) = 1.0;
    xi.tail(p) = data.covariates.row(i).transpose();
    sum.add(xi * xi.transpose());
  }
  out.vec_sigma_hat = symmetrized(sum.value() / static_cast<double>(n));

  // Only the covariate block carries the ridge:
  // [[1, mu^T], [mu, Sigma_rho + mu mu^T]].
  out.vec_sigma_hat_reg = out.vec_sigma_hat;
  out.vec_sigma_hat_reg.bottomRightCorner(p, p) += moments.rho * Matrix::Identity(p, p);
  return out;
}

namespace {

Vector augmented(const Vector& x) {
  Vector out(x.size() + 1);
  out(0) = 1.0;
  out.tail(x.size()) = x;
  return out;
}

// Pseudo-inverse of a self-adjoint operator through the symmetric subspace.
// Raises SingularOperator when an eigenvalue there drops below floor_value.
Matrix invert_on_symmetric_subspace(const Matrix& op, Eigen::Index d, double floor_value,
                                    const char* what) {
  const Matrix basis = symmetric_subspace_basis(d);
  const Matrix restricted = symmetrized(basis.transpose() * op * basis);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(restricted);
  if (solver.info() != Eigen::Success)
    raise(ErrorKind::NumericalBreakdown, std::string(what) + ": eigendecomposition failed");
  const double lmin = solver.eigenvalues().minCoeff();
  if (lmin < floor_value)
    raise(ErrorKind::SingularOperator,
          std::string(what) + ": plug-in operator has eigenvalue " + std::to_string(lmin) +
              " below floor");
  const Matrix inv_restricted = solver.eigenvectors() *
                                solver.eigenvalues().cwiseInverse().asDiagonal() *
                                solver.eigenvectors().transpose();
  return symmetrized(basis * inv_restricted * basis.transpose());
}

}  // namespace

CltEstimate clt_covariance(const Vector& x, const Dataset& data, const RegressionFit& fit,
                           const MomentEstimates& moments, const NumericConfig& cfg) {
  if (!fit.converged)
    raise(ErrorKind::NonConvergence, "clt_covariance requires a converged fit at x");
  validate_dataset(data);
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  const Eigen::Index d = data.d();
  const Matrix& q_hat = fit.estimate.mat();
  const Matrix identity = Matrix::Identity(d, d);

  const Vector w = weights(x, moments, data);
  const AugmentedMoments aug = augmented_moments(data, moments);

  // Transport maps from the fitted matrix to each response, shared by the
  // score terms and the Hessian.
  std::vector<Matrix> residuals(n);  // T_i - I
  for (Eigen::Index i = 0; i < n; ++i)
    residuals[i] = ot_map(q_hat, data.responses[i].mat(), cfg) - identity;

  // M_k = n^{-1} sum_j augmented(X_j)_k (T_j - I).
  std::vector<detail::KahanMatrixSum> m_sums(p + 1, detail::KahanMatrixSum(d, d));
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vector xj = augmented(data.covariates.row(j).transpose());
    for (Eigen::Index k = 0; k <= p; ++k) m_sums[k].add(xj(k) * residuals[j]);
  }
  std::vector<Matrix> m_terms(p + 1);
  for (Eigen::Index k = 0; k <= p; ++k) m_terms[k] = m_sums[k].value() / static_cast<double>(n);

  Eigen::LDLT<Matrix> reg_ldlt(aug.vec_sigma_hat_reg);
  if (reg_ldlt.info() != Eigen::Success)
    raise(ErrorKind::SingularCovariance, "clt_covariance: augmented moment matrix is singular");
  const Vector a = reg_ldlt.solve(augmented(x));
  const Vector sigma_a = aug.vec_sigma_hat * a;

  detail::KahanMatrixSum xi_sum(d * d, d * d);
  detail::KahanMatrixSum h_sum(d * d, d * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector xi = augmented(data.covariates.row(i).transpose());
    const Vector c = reg_ldlt.solve(xi * xi.dot(a) - sigma_a);

    Matrix v = w(i) * residuals[i];  // V_{x,1,i}
    for (Eigen::Index k = 0; k <= p; ++k) v -= c(k) * m_terms[k];  // + V_{x,2,i}
    const Vector v_vec = vec(v);
    xi_sum.add(v_vec * v_vec.transpose());

    h_sum.add(-w(i) * dt_operator(q_hat, data.responses[i].mat(), cfg).m);
  }

  CltEstimate out;
  out.xi_hat.dim = d;
  out.xi_hat.m = symmetrized(xi_sum.value() / static_cast<double>(n));
  const Matrix h_bar = symmetrized(h_sum.value() / static_cast<double>(n));
  out.h_hat_inv.dim = d;
  out.h_hat_inv.m = invert_on_symmetric_subspace(h_bar, d, cfg.operator_floor, "clt_covariance");
  out.omega_hat = symmetrized(out.h_hat_inv.m * out.xi_hat.m * out.h_hat_inv.m.transpose());

  out.entry_variances.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      const Eigen::Index pos = j * d + i;  // column-major entry index
      out.entry_variances(i, j) = out.omega_hat(pos, pos);
    }
  return out;
}

std::pair<double, double> confidence_interval(Eigen::Index i, Eigen::Index j, double level,
                                              const CltEstimate& clt, const RegressionFit& fit,
                                              Eigen::Index n) {
  if (!(level > 0.0 && level < 1.0))
    raise(ErrorKind::InvalidArgument, "confidence_interval: level must lie in (0,1)");
  const Eigen::Index d = fit.estimate.dim();
  if (i < 0 || j < 0 || i >= d || j >= d)
    raise(ErrorKind::DimensionMismatch, "confidence_interval: entry out of range");
  const double center = fit.estimate.mat()(i, j);
  const double variance = clt.entry_variances(i, j);
  if (variance <= 0.0) return {center, center};
  const double z = normal_quantile(0.5 * (1.0 + level));
  const double half_width = z * std::sqrt(variance / static_cast<double>(n));
  return {center - half_width, center + half_width};
}

TestComponents test_statistic(const Dataset& data, const MomentEstimates& moments,
                              const FitConfig& config) {
  validate_dataset(data);
  const Eigen::Index n = data.n();
  const Eigen::Index d = data.d();
  const NumericConfig& cfg = config.numeric;

  TestComponents out;
  out.barycenter_fit = barycenter(data, moments, config);

  out.per_sample_fits.resize(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    out.per_sample_fits[i] =
        fit(data.covariates.row(static_cast<Eigen::Index>(i)).transpose(), data, moments, config);
  });

  std::string failures;
  if (!out.barycenter_fit.converged) failures = "barycenter";
  for (Eigen::Index i = 0; i < n; ++i)
    if (!out.per_sample_fits[i].converged)
      failures += (failures.empty() ? "" : ", ") + std::to_string(i);
  if (!failures.empty())
    raise(ErrorKind::NonConvergence, "test_statistic: fits did not converge at: " + failures);

  const Matrix& bary = out.barycenter_fit.estimate.mat();
  detail::KahanMatrixSum h_sum(d * d, d * d);
  for (Eigen::Index i = 0; i < n; ++i)
    h_sum.add(-dt_operator(bary, data.responses[i].mat(), cfg).m);
  out.h_hat.dim = d;
  out.h_hat.m = symmetrized(h_sum.value() / static_cast<double>(n));

  detail::KahanSum statistic;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix diff = out.per_sample_fits[i].estimate.mat() - bary;
    statistic.add(out.h_hat.apply(diff).squaredNorm());
  }
  out.statistic = statistic.value();
  return out;
}

Vector null_eigenvalues(const Dataset& data, const RegressionFit& bary,
                        const NumericConfig& cfg) {
  if (!bary.converged)
    raise(ErrorKind::NonConvergence, "null_eigenvalues requires a converged barycenter fit");
  const Eigen::Index n = data.n();
  const Eigen::Index d = data.d();
  const Matrix identity = Matrix::Identity(d, d);

  detail::KahanMatrixSum gram(d * d, d * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector t_vec =
        vec(ot_map(bary.estimate.mat(), data.responses[i].mat(), cfg) - identity);
    gram.add(t_vec * t_vec.transpose());
  }
  const Matrix op = symmetrized(gram.value() / static_cast<double>(n));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(op, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    raise(ErrorKind::NumericalBreakdown, "null_eigenvalues: eigendecomposition failed");

  Vector eigs = solver.eigenvalues().reverse();  // descending
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (eigs(i) < -1e-10)
      raise(ErrorKind::NumericalBreakdown,
            "null_eigenvalues: Gram operator has eigenvalue " + std::to_string(eigs(i)));
    if (eigs(i) < 0.0) eigs(i) = 0.0;
  }
  return eigs;
}

std::vector<double> weighted_chisq_draws(const Vector& lambdas, int p_dof, int mc,
                                         std::uint64_t seed) {
  if (p_dof < 1) raise(ErrorKind::InvalidArgument, "weighted_chisq_draws: p_dof must be >= 1");
  if (mc < 1) raise(ErrorKind::InvalidArgument, "weighted_chisq_draws: mc must be >= 1");
  for (Eigen::Index j = 0; j < lambdas.size(); ++j)
    if (lambdas(j) < 0.0)
      raise(ErrorKind::InvalidArgument, "weighted_chisq_draws: negative eigenvalue");

  // Eigenvalues that are pure numerical noise are dropped from the sum.
  std::vector<Eigen::Index> active;
  const double lead = lambdas.size() > 0 ? lambdas.maxCoeff() : 0.0;
  for (Eigen::Index j = 0; j < lambdas.size(); ++j)
    if (lambdas(j) > 1e-12 * lead) active.push_back(j);

  std::vector<double> draws(static_cast<std::size_t>(mc), 0.0);
  parallel_for(draws.size(), [&](std::size_t m) {
    double value = 0.0;
    for (const Eigen::Index j : active) {
      // One stream per (draw, eigenvalue index): scaling the lambdas reuses
      // identical chi-square variates, so positive homogeneity is exact.
      StreamRng rng(seed, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(j));
      value += lambdas(j) * rng.chi_square(p_dof);
    }
    draws[m] = value;
  });
  std::sort(draws.begin(), draws.end());
  return draws;
}

double weighted_chisq_quantile(const Vector& lambdas, int p_dof, double alpha, int mc,
                               std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0))
    raise(ErrorKind::InvalidArgument, "weighted_chisq_quantile: alpha must lie in (0,1)");
  const auto draws = weighted_chisq_draws(lambdas, p_dof, mc, seed);
  return sorted_quantile(draws, 1.0 - alpha);
}

namespace {

TestResult assemble_test(const Dataset& data, double alpha, const FitConfig& config, int mc,
                         std::uint64_t seed, std::optional<double> rho) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    raise(ErrorKind::InvalidArgument, "run_test: alpha must lie in (0,1]");
  const MomentEstimates moments =
      empirical_moments(data, rho.value_or(default_rho(data)), config.numeric);
  const TestComponents components = test_statistic(data, moments, config);

  TestResult out;
  out.statistic = components.statistic;
  out.eigenvalues = null_eigenvalues(data, components.barycenter_fit, config.numeric);
  out.p_dof = static_cast<int>(data.p());
  out.mc_samples = mc;
  out.seed = seed;

  // Degenerate null: when every response already sits at the barycenter the
  // eigenvalues and the statistic are both rounding noise, and the null law
  // is a point mass at zero.
  constexpr double kDegenerateFloor = 1e-20;
  const double lead = out.eigenvalues.size() > 0 ? out.eigenvalues(0) : 0.0;
  if (lead <= kDegenerateFloor) {
    const bool zero_statistic =
        out.statistic <= kDegenerateFloor * static_cast<double>(data.n());
    out.quantile = 0.0;
    out.p_value = zero_statistic ? 1.0 : 0.0;
    out.reject = !zero_statistic;
    return out;
  }

  const auto draws = weighted_chisq_draws(out.eigenvalues, out.p_dof, mc, seed);
  // alpha = 1 degenerates to the always-reject test (quantile index 0).
  out.quantile = alpha < 1.0 ? sorted_quantile(draws, 1.0 - alpha) : 0.0;
  const auto first_ge = std::lower_bound(draws.begin(), draws.end(), out.statistic);
  out.p_value = static_cast<double>(draws.end() - first_ge) / static_cast<double>(mc);
  out.reject = out.statistic > out.quantile;
  return out;
}

}  // namespace

TestResult run_test(const Dataset& data, double alpha, const FitConfig& config, int mc,
                    std::uint64_t seed, std::optional<double> rho) {
  return assemble_test(data, alpha, config, mc, seed, rho);
}

TestResult estimated_covariance_test(const Dataset& surrogate_data, double alpha,
                                     const FitConfig& config, int mc, std::uint64_t seed,
                                     std::optional<double> rho) {
  for (std::size_t i = 0; i < surrogate_data.responses.size(); ++i) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(surrogate_data.responses[i].mat(),
                                                 Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success ||
        solver.eigenvalues().minCoeff() <= config.numeric.eig_floor)
      raise(ErrorKind::RankDeficientSurrogate,
            "surrogate response " + std::to_string(i) + " is numerically singular");
  }
  return assemble_test(surrogate_data, alpha, config, mc, seed, rho);
}

}  // namespace bwf
