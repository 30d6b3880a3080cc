// Acceptance suite: every criterion prints one pass/fail line with measured
// values. Run with a criterion number (1..10) or "all".

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <bwf/dataset_io.hpp>
#include <bwf/inference.hpp>
#include <bwf/regression.hpp>
#include <bwf/simulation.hpp>
#include <bwf/stats.hpp>

using namespace bwf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double value) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.4g", value);
  return buffer;
}

Matrix random_spd(int d, StreamRng& rng, double lo = 0.5, double hi = 2.5) {
  const Matrix u = haar_orthogonal(d, rng);
  Vector eigs(d);
  for (int k = 0; k < d; ++k) eigs(k) = rng.uniform(lo, hi);
  return symmetrized(u * eigs.asDiagonal() * u.transpose());
}

Matrix random_symmetric(int d, StreamRng& rng) {
  Matrix a(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) a(i, j) = rng.uniform(-1.0, 1.0);
  return symmetrized(a);
}

// 1. Geometry property suite on 500 random instances, d in 2..8.
Outcome criterion1() {
  StreamRng rng(101);
  const int instances = 500;
  double worst_fd = 0.0;
  for (int rep = 0; rep < instances; ++rep) {
    const int d = 2 + rep % 7;
    const Matrix a = random_spd(d, rng);
    const Matrix b = random_spd(d, rng);
    const Matrix c = random_spd(d, rng);
    const double scale = rng.uniform(0.2, 4.0);
    const Matrix rot = haar_orthogonal(d, rng);

    const double base = bw_distance(a, b);
    if (std::abs(bw_distance(scale * a, scale * b) - std::sqrt(scale) * base) > 1e-10 * base)
      return {false, "scaling homogeneity failed"};
    if (std::abs(bw_distance(rot * a * rot.transpose(), rot * b * rot.transpose()) - base) >
        1e-10 * base)
      return {false, "rotation invariance failed"};
    if (bw_distance(a, c) > bw_distance(a, b) + bw_distance(b, c) + 1e-9)
      return {false, "triangle inequality failed"};

    const Matrix t = ot_map(a, b);
    if ((t * a * t - b).norm() > 1e-8 * b.norm()) return {false, "pushforward identity failed"};

    const Matrix h = random_symmetric(d, rng);
    const double step = 1e-5;
    const Matrix fd = (ot_map(a + step * h, b) - ot_map(a - step * h, b)) / (2.0 * step);
    const Matrix analytic = dt_map(a, b, h);
    const double fd_err = (analytic - fd).norm() / fd.norm();
    worst_fd = std::max(worst_fd, fd_err);
    if (fd_err >= 1e-5) return {false, "dT finite-difference error " + fmt(fd_err)};

    const Matrix x = random_symmetric(d, rng);
    const Matrix y = random_symmetric(d, rng);
    const Matrix dtx = dt_map(a, b, x);
    const double self_adjoint_gap = std::abs((dtx.array() * y.array()).sum() -
                                             (x.array() * dt_map(a, b, y).array()).sum());
    if (self_adjoint_gap > 1e-9) return {false, "dT self-adjointness failed"};
    const double form = (dtx.array() * x.array()).sum();
    if (form > 1e-10) return {false, "dT negative semi-definiteness failed"};

    const Matrix b_root = sqrtm(b);
    Eigen::SelfAdjointEigenSolver<Matrix> mid(symmetrized(b_root * a * b_root));
    const Matrix a_inv_root = sqrtm(a).inverse();
    const double weight = (a_inv_root * x * a_inv_root).squaredNorm();
    const double lo = 0.5 * std::sqrt(mid.eigenvalues().minCoeff()) * weight;
    const double hi = 0.5 * std::sqrt(mid.eigenvalues().maxCoeff()) * weight;
    if (-form < lo * (1.0 - 1e-9) || -form > hi * (1.0 + 1e-9))
      return {false, "dT two-sided eigenvalue bound failed"};
  }
  return {true, "500 instances, worst dT finite-difference rel. err. " + fmt(worst_fd)};
}

// 2. Optimizer against closed-form and grid-search oracles.
Outcome criterion2() {
  StreamRng rng(102);
  double worst_commuting = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int d = 2 + rep % 3;
    const int n = 4 + rep % 4;
    const Matrix u = haar_orthogonal(d, rng);
    Matrix covariates(n, 1);
    std::vector<Matrix> responses;
    Matrix mean_root = Matrix::Zero(d, d);
    for (int i = 0; i < n; ++i) {
      covariates(i, 0) = rng.uniform(-1.0, 1.0);
      Vector eigs(d);
      for (int k = 0; k < d; ++k) eigs(k) = rng.uniform(0.4, 4.0);
      const Matrix q = symmetrized(u * eigs.asDiagonal() * u.transpose());
      responses.push_back(q);
      mean_root += sqrtm(q);
    }
    mean_root /= static_cast<double>(n);
    const Matrix closed_form = mean_root * mean_root;

    const Dataset data = make_dataset(covariates, responses);
    const RegressionFit bary = barycenter(data, empirical_moments(data, default_rho(data)));
    if (!bary.converged) return {false, "commuting barycenter did not converge"};
    const double err = (bary.estimate.mat() - closed_form).norm() / closed_form.norm();
    worst_commuting = std::max(worst_commuting, err);
    if (err >= 1e-8) return {false, "closed-form mismatch " + fmt(err)};
  }

  double worst_grid = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 5;
    Matrix covariates(n, 1);
    std::vector<Matrix> responses;
    for (int i = 0; i < n; ++i) {
      covariates(i, 0) = rng.uniform(-1.0, 1.0);
      responses.push_back(random_spd(2, rng, 0.5, 3.0));
    }
    const Dataset data = make_dataset(covariates, responses);
    const MomentEstimates moments = empirical_moments(data, default_rho(data));
    const RegressionFit bary = barycenter(data, moments);
    const Vector x_bar = data.covariates.colwise().mean().transpose();

    auto grid_minimum = [&](const Matrix& center, double step) {
      Matrix best = center;
      double best_value = objective(x_bar, center, data, moments);
      for (int da = -5; da <= 5; ++da)
        for (int db = -5; db <= 5; ++db)
          for (int dc = -5; dc <= 5; ++dc) {
            Matrix s(2, 2);
            s << center(0, 0) + step * da, center(0, 1) + step * dc,
                center(0, 1) + step * dc, center(1, 1) + step * db;
            if (s(0, 0) <= 0.0 || s.determinant() <= 0.0) continue;
            const double value = objective(x_bar, s, data, moments);
            if (value < best_value) {
              best_value = value;
              best = s;
            }
          }
      return best;
    };
    const Matrix refined = grid_minimum(grid_minimum(bary.estimate.mat(), 1e-2), 1e-3);
    const double gap = (bary.estimate.mat() - refined).cwiseAbs().maxCoeff();
    worst_grid = std::max(worst_grid, gap);
    if (gap > 1.5e-3) return {false, "grid-search gap " + fmt(gap)};
  }
  return {true, "worst closed-form rel. err. " + fmt(worst_commuting) +
                    ", worst grid gap " + fmt(worst_grid)};
}

// 3. Default-configuration convergence speed on example 2.
Outcome criterion3() {
  ExampleConfig cfg;
  cfg.which = ExampleConfig::Which::Example2;
  cfg.n = 200;
  cfg.p = 5;
  cfg.d = 6;
  cfg.delta = 0.0;
  int fast = 0;
  const int trials = 100;
  double mean_iters = 0.0;
  for (int t = 0; t < trials; ++t) {
    cfg.seed = derive_seed(103, 0, static_cast<std::uint64_t>(t));
    const GeneratedData gen = generate_example2(cfg);
    StreamRng x_rng(103, 1, static_cast<std::uint64_t>(t));
    Vector x(5);
    for (int j = 0; j < 5; ++j) x(j) = x_rng.uniform(-1.0, 1.0);
    const RegressionFit fitted =
        fit(x, gen.data, empirical_moments(gen.data, default_rho(gen.data)));
    mean_iters += fitted.iters;
    if (fitted.converged && fitted.iters <= 10) ++fast;
  }
  mean_iters /= trials;
  const double share = static_cast<double>(fast) / trials;
  return {share >= 0.95, fmt(100.0 * share) + "% converged within 10 iterations (mean " +
                             fmt(mean_iters) + ")"};
}

// 4. CLT normality of the plug-in normalized errors (entries (1,1), (2,1)).
Outcome criterion4() {
  ExampleConfig cfg;
  cfg.n = 200;
  cfg.p = 5;
  cfg.d = 5;
  cfg.delta = 0.0;
  cfg.seed = 104;
  const ExperimentReport report = run_qq_experiment(cfg, 200, Vector::Zero(5));

  bool pass = true;
  std::string detail;
  for (const auto& row : report.summary_rows) {
    const int i = static_cast<int>(row[0]);
    const int j = static_cast<int>(row[1]);
    if (!((i == 0 && j == 0) || (i == 1 && j == 0))) continue;
    const double count = row[2];
    const double ks = row[3];
    const double slope = row[4];
    const double intercept = row[5];
    const double critical = kolmogorov_critical_value(0.01, static_cast<std::size_t>(count));
    const bool entry_pass = ks < critical && slope >= 0.85 && slope <= 1.15 &&
                            intercept >= -0.15 && intercept <= 0.15;
    pass = pass && entry_pass;
    detail += "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "): KS " + fmt(ks) +
              " vs " + fmt(critical) + ", slope " + fmt(slope) + ", intercept " +
              fmt(intercept) + "; ";
  }
  return {pass, detail};
}

// 5. Null distribution of the statistic against the plug-in weighted
//    chi-square law.
Outcome criterion5() {
  ExampleConfig cfg;
  cfg.n = 200;
  cfg.p = 5;
  cfg.d = 5;
  cfg.delta = 0.0;
  const ExperimentReport report = run_null_qq(cfg, 200, 0.05, kDefaultMcSamples, 105);
  const auto& row = report.summary_rows.at(0);
  const double slope = row[1];
  const double intercept = row[2];
  const double median = row[3];
  const bool pass = slope >= 0.85 && slope <= 1.15 && std::abs(intercept) <= 0.10 * median;
  return {pass, "slope " + fmt(slope) + ", intercept " + fmt(intercept) + " (null median " +
                    fmt(median) + ")"};
}

// 6. Size of the level-0.05 test under the null.
Outcome criterion6() {
  ExampleConfig cfg;
  cfg.n = 200;
  cfg.p = 5;
  cfg.d = 5;
  const ExperimentReport report =
      run_size_power(cfg, {0.0}, 500, 0.05, kDefaultMcSamples, 106);
  const double rate = report.summary_rows.at(0)[2];
  return {rate >= 0.025 && rate <= 0.075, "rejection rate " + fmt(rate) + " over 500 replicates"};
}

// 7. Power is monotone in the effect size and high at delta = 0.3.
Outcome criterion7() {
  ExampleConfig cfg;
  cfg.n = 200;
  cfg.p = 5;
  cfg.d = 5;
  const std::vector<double> deltas = {0.0, 0.1, 0.2, 0.3};
  const int trials = 200;
  const ExperimentReport report =
      run_size_power(cfg, deltas, trials, 0.05, kDefaultMcSamples, 107);

  std::string detail = "rates ";
  bool monotone = true;
  double previous_rate = 0.0, previous_se = 0.0;
  double last_rate = 0.0;
  for (std::size_t k = 0; k < report.summary_rows.size(); ++k) {
    const double rate = report.summary_rows[k][2];
    const double se = report.summary_rows[k][3];
    detail += fmt(rate) + (k + 1 < report.summary_rows.size() ? ", " : "");
    if (k > 0 && rate < previous_rate - 2.0 * std::sqrt(previous_se * previous_se + se * se))
      monotone = false;
    previous_rate = rate;
    previous_se = se;
    last_rate = rate;
  }
  const bool pass = monotone && last_rate >= 0.9;
  return {pass, detail + "; monotone " + (monotone ? "yes" : "no")};
}

// 8. Robustness with sample-covariance surrogates (n_tilde = 100).
Outcome criterion8() {
  ExampleConfig cfg;
  cfg.n = 200;
  cfg.p = 5;
  cfg.d = 5;
  const ExperimentReport report =
      run_null_qq(cfg, 500, 0.05, kDefaultMcSamples, 108, /*n_tilde=*/100);
  const auto& row = report.summary_rows.at(0);
  const double slope = row[1];
  const double rate = row[4];
  const bool pass = rate >= 0.02 && rate <= 0.08 && slope >= 0.8 && slope <= 1.2;
  return {pass, "size " + fmt(rate) + ", null Q-Q slope " + fmt(slope)};
}

// 9. Weighted chi-square quantile against the analytic chi2_1 value.
Outcome criterion9() {
  Vector one(1);
  one << 1.0;
  const double analytic = 3.8414588206941236;
  const double estimate = weighted_chisq_quantile(one, 1, 0.05, 1000000, 109);
  const double rel = std::abs(estimate - analytic) / analytic;

  Vector lambdas(3);
  lambdas << 0.9, 0.4, 0.05;
  const double base = weighted_chisq_quantile(lambdas, 5, 0.05, 50000, 110);
  const double doubled = weighted_chisq_quantile(Vector(2.0 * lambdas), 5, 0.05, 50000, 110);
  const bool homogeneous = doubled == 2.0 * base;
  return {rel < 0.005 && homogeneous,
          "quantile " + fmt(estimate) + " (rel. err. " + fmt(rel) + "), homogeneity " +
              (homogeneous ? "exact" : "violated")};
}

// 10. Determinism: reruns with one master seed are byte-identical.
Outcome criterion10() {
  ExampleConfig cfg;
  cfg.n = 40;
  cfg.p = 2;
  cfg.d = 3;
  cfg.seed = 111;

  auto read_all = [](const std::string& path) {
    std::ifstream in(path);
    std::stringstream stream;
    stream << in.rdbuf();
    return stream.str();
  };

  std::vector<std::string> paths;
  bool pass = true;
  for (int round = 0; round < 2; ++round) {
    const std::string tag = round == 0 ? "a" : "b";
    save_report(run_size_power(cfg, {0.0, 0.2}, 6, 0.1, 5000, 112),
                "acceptance_det_size_" + tag + ".csv");
    save_report(run_qq_experiment(cfg, 4, Vector::Zero(2)),
                "acceptance_det_qq_" + tag + ".csv");
  }
  for (const std::string stem : {"acceptance_det_size_", "acceptance_det_qq_"}) {
    for (const std::string suffix : {".csv", "_summary.csv", ".meta.json"}) {
      const std::string a = read_all(stem + "a" + suffix);
      const std::string b = read_all(stem + "b" + suffix);
      pass = pass && !a.empty() && a == b;
      paths.push_back(stem + "a" + suffix);
      paths.push_back(stem + "b" + suffix);
    }
  }
  for (const auto& p : paths) std::remove(p.c_str());
  return {pass, pass ? "size and qq reports byte-identical across reruns"
                     : "report bytes differ between reruns"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "geometry property suite", criterion1},
      {2, "optimizer oracle equivalence", criterion2},
      {3, "default-config convergence speed", criterion3},
      {4, "CLT normality of normalized errors", criterion4},
      {5, "null distribution Q-Q", criterion5},
      {6, "test size at alpha = 0.05", criterion6},
      {7, "power monotone and high at delta = 0.3", criterion7},
      {8, "estimated-covariance robustness", criterion8},
      {9, "weighted chi-square quantile oracle", criterion9},
      {10, "experiment determinism", criterion10},
  };

  int selected = 0;  // 0 = all
  if (argc > 1 && std::strcmp(argv[1], "all") != 0) selected = std::atoi(argv[1]);

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (selected != 0 && criterion.id != selected) continue;
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %d: %s — %s\n", outcome.pass ? "PASS" : "FAIL", criterion.id,
                criterion.name, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
