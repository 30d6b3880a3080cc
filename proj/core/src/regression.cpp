#include "bwf/regression.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "accumulate.hpp"

namespace bwf {

Dataset make_dataset(Matrix covariates, const std::vector<Matrix>& responses,
                     const NumericConfig& cfg) {
  Dataset data;
  data.covariates = std::move(covariates);
  data.responses.reserve(responses.size());
  for (std::size_t i = 0; i < responses.size(); ++i) {
    try {
      data.responses.emplace_back(responses[i], cfg);
    } catch (const Error& e) {
      raise(e.kind(), "response " + std::to_string(i) + ": " + e.what());
    }
  }
  validate_dataset(data);
  return data;
}

void validate_dataset(const Dataset& data) {
  if (data.n() < 1) raise(ErrorKind::InvalidArgument, "dataset is empty");
  if (static_cast<Eigen::Index>(data.responses.size()) != data.n())
    raise(ErrorKind::DimensionMismatch, "covariate rows and response count differ");
  if (!data.covariates.allFinite())
    raise(ErrorKind::InvalidArgument, "covariates contain non-finite values");
  const Eigen::Index d = data.d();
  for (std::size_t i = 0; i < data.responses.size(); ++i)
    if (data.responses[i].dim() != d)
      raise(ErrorKind::DimensionMismatch, "response " + std::to_string(i) + " has wrong dimension");
}

double default_rho(const Dataset& data) { return 1.0 / static_cast<double>(data.n()); }

MomentEstimates empirical_moments(const Dataset& data, double rho, const NumericConfig& cfg) {
  validate_dataset(data);
  if (data.n() < 2) raise(ErrorKind::InvalidArgument, "moments need at least two samples");
  if (rho < 0.0) raise(ErrorKind::InvalidArgument, "rho must be nonnegative");
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();

  MomentEstimates out;
  out.rho = rho;
  detail::KahanMatrixSum mean_sum(p, 1);
  for (Eigen::Index i = 0; i < n; ++i) mean_sum.add(data.covariates.row(i).transpose());
  out.mean = mean_sum.value() / static_cast<double>(n);

  detail::KahanMatrixSum cov_sum(p, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector centered = data.covariates.row(i).transpose() - out.mean;
    cov_sum.add(centered * centered.transpose());
  }
  out.cov_reg = symmetrized(cov_sum.value() / static_cast<double>(n));
  out.cov_reg += rho * Matrix::Identity(p, p);

  if (rho == 0.0) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(out.cov_reg, Eigen::EigenvaluesOnly);
    const double lmin = solver.eigenvalues().minCoeff();
    const double lmax = solver.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > cfg.condition_limit)
      raise(ErrorKind::SingularCovariance,
            "covariance is numerically singular with rho = 0 (condition number too large)");
  }
  return out;
}

Vector weights(const Vector& x, const MomentEstimates& moments, const Dataset& data) {
  if (x.size() != data.p())
    raise(ErrorKind::DimensionMismatch, "weights: x has wrong dimension");
  Eigen::LDLT<Matrix> ldlt(moments.cov_reg);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    raise(ErrorKind::SingularCovariance, "weights: covariance factorization failed");
  const Vector direction = ldlt.solve(x - moments.mean);
  const Eigen::Index n = data.n();
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i)
    w(i) = 1.0 + direction.dot(data.covariates.row(i).transpose() - moments.mean);
  return w;
}

double objective(const Vector& x, const Matrix& s, const Dataset& data,
                 const MomentEstimates& moments, const NumericConfig& cfg) {
  const Vector w = weights(x, moments, data);
  detail::KahanSum sum;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    sum.add(w(i) * bw_distance_sq(s, data.responses[i].mat(), cfg));
  return sum.value() / static_cast<double>(data.n());
}

namespace {

Matrix initial_iterate(const Dataset& data, const FitConfig& config) {
  const Eigen::Index d = data.d();
  switch (config.init) {
    case FitConfig::Init::Identity:
      return Matrix::Identity(d, d);
    case FitConfig::Init::Mean: {
      detail::KahanMatrixSum sum(d, d);
      for (const auto& q : data.responses) sum.add(q.mat());
      return sum.value() / static_cast<double>(data.n());
    }
    case FitConfig::Init::Custom:
      return SpdMatrix(config.custom_init, config.numeric).mat();
  }
  raise(ErrorKind::InvalidArgument, "fit: unknown initialization");
}

void validate_fit_config(const FitConfig& config) {
  if (!(config.eta > 0.0)) raise(ErrorKind::InvalidArgument, "fit: eta must be positive");
  if (!(config.eps > 0.0)) raise(ErrorKind::InvalidArgument, "fit: eps must be positive");
  if (config.max_iters < 1) raise(ErrorKind::InvalidArgument, "fit: max_iters must be >= 1");
}

// Weighted gradient-field mean n^{-1} sum_i w_i (T_S^{Q_i} - I) computed via
// T_S^{Q_i} = S^{-1/2} (S^{1/2} Q_i S^{1/2})^{1/2} S^{-1/2}.
Matrix mean_transport_residual(const Matrix& s_sqrt, const Matrix& s_inv_sqrt,
                               const Dataset& data, const Vector& w, const NumericConfig& cfg) {
  const Eigen::Index d = data.d();
  const Matrix identity = Matrix::Identity(d, d);
  detail::KahanMatrixSum sum(d, d);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const Matrix mid = symmetrized(s_sqrt * data.responses[i].mat() * s_sqrt);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(mid);
    if (solver.info() != Eigen::Success)
      raise(ErrorKind::NumericalBreakdown, "fit: eigendecomposition failed");
    const Vector roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Matrix mid_sqrt = solver.eigenvectors() * roots.asDiagonal() *
                            solver.eigenvectors().transpose();
    const Matrix transport = symmetrized(s_inv_sqrt * mid_sqrt * s_inv_sqrt);
    sum.add(w(i) * (transport - identity));
  }
  return sum.value() / static_cast<double>(data.n());
}

}  // namespace

RegressionFit fit(const Vector& x, const Dataset& data, const MomentEstimates& moments,
                  const FitConfig& config, const FitMonitor& monitor) {
  validate_dataset(data);
  validate_fit_config(config);
  const NumericConfig& cfg = config.numeric;
  const Eigen::Index d = data.d();
  const Vector w = weights(x, moments, data);

  Matrix s = initial_iterate(data, config);
  RegressionFit out;

  for (int t = 1; t <= config.max_iters; ++t) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
    if (solver.info() != Eigen::Success)
      raise(ErrorKind::NumericalBreakdown, "fit: iterate eigendecomposition failed");
    Vector eigs = solver.eigenvalues();
    const double lmin = eigs.minCoeff();
    if (lmin <= cfg.eig_floor) {
      // G S G keeps iterates PD in exact arithmetic; anything materially
      // negative is a genuine breakdown, the rest is rounding.
      if (lmin < -cfg.eig_floor)
        raise(ErrorKind::NotPositiveDefinite,
              "fit: iterate lost positive definiteness at iteration " + std::to_string(t));
      eigs = eigs.cwiseMax(2.0 * cfg.eig_floor);
      s = symmetrized(solver.eigenvectors() * eigs.asDiagonal() *
                      solver.eigenvectors().transpose());
      ++out.clamped_steps;
    }
    const Vector roots = eigs.cwiseMax(cfg.eig_floor).cwiseSqrt();
    const Matrix s_sqrt = solver.eigenvectors() * roots.asDiagonal() *
                          solver.eigenvectors().transpose();
    const Matrix s_inv_sqrt = solver.eigenvectors() * roots.cwiseInverse().asDiagonal() *
                              solver.eigenvectors().transpose();

    const Matrix gradient = mean_transport_residual(s_sqrt, s_inv_sqrt, data, w, cfg);
    const double grad_norm = gradient.norm();
    if (monitor) monitor(t, s, grad_norm);

    out.iters = t;
    out.grad_norm = grad_norm;
    if (config.eta * grad_norm < config.eps) {
      out.converged = true;
      break;
    }
    const Matrix g = Matrix::Identity(d, d) + config.eta * gradient;
    s = symmetrized(g * s * g);

    if (t == config.max_iters) {
      // One more residual evaluation so grad_norm and the convergence flag
      // describe the returned iterate.
      Eigen::SelfAdjointEigenSolver<Matrix> final_solver(s);
      const Vector final_roots = final_solver.eigenvalues().cwiseMax(cfg.eig_floor).cwiseSqrt();
      const Matrix fs = final_solver.eigenvectors() * final_roots.asDiagonal() *
                        final_solver.eigenvectors().transpose();
      const Matrix fsi = final_solver.eigenvectors() * final_roots.cwiseInverse().asDiagonal() *
                         final_solver.eigenvectors().transpose();
      out.grad_norm = mean_transport_residual(fs, fsi, data, w, cfg).norm();
      out.converged = config.eta * out.grad_norm < config.eps;
    }
  }

  try {
    out.estimate = SpdMatrix(s, cfg);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotPositiveDefinite) throw;
    // The final update may graze the floor; apply the iterate clamp policy.
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
    const double lmin = solver.eigenvalues().minCoeff();
    if (lmin < -cfg.eig_floor)
      raise(ErrorKind::NotPositiveDefinite,
            "fit: estimate lost positive definiteness at iteration " +
                std::to_string(out.iters));
    const Vector eigs = solver.eigenvalues().cwiseMax(2.0 * cfg.eig_floor);
    ++out.clamped_steps;
    out.estimate = SpdMatrix(
        symmetrized(solver.eigenvectors() * eigs.asDiagonal() *
                    solver.eigenvectors().transpose()),
        cfg);
  }
  return out;
}

RegressionFit barycenter(const Dataset& data, const MomentEstimates& moments,
                         const FitConfig& config) {
  validate_dataset(data);
  detail::KahanMatrixSum sum(data.p(), 1);
  for (Eigen::Index i = 0; i < data.n(); ++i) sum.add(data.covariates.row(i).transpose());
  const Vector x_bar = sum.value() / static_cast<double>(data.n());
  return fit(x_bar, data, moments, config);
}

}  // namespace bwf
