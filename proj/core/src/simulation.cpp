#include "bwf/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include <Eigen/QR>

#include "accumulate.hpp"
#include "bwf/parallel.hpp"
#include "bwf/stats.hpp"
#include "bwf/version.hpp"

namespace bwf {

namespace {

// Stream ids of the counter-based generator. Per-sample streams are keyed by
// (dataset seed, stream, sample index); per-trial seeds by
// (master seed, stream, composite trial index). Everything is a pure
// function of the master seed, so reruns and parallel schedules agree.
constexpr std::uint64_t kStreamBasis = 0;
constexpr std::uint64_t kStreamCovariates = 1;
constexpr std::uint64_t kStreamScales = 2;
constexpr std::uint64_t kStreamBlockBasis = 3;
constexpr std::uint64_t kStreamSurrogate = 4;
constexpr std::uint64_t kStreamTrialData = 100;
constexpr std::uint64_t kStreamTrialSurrogate = 101;
constexpr std::uint64_t kStreamTrialMc = 102;

double diag_entry_example1(int k, const Vector& x, double delta) {
  return 1.5 + 0.5 * static_cast<double>(k + 1) + delta * x.sum();
}

double diag_entry_example2(int k, const Vector& x, double delta) {
  return 1.5 + 0.5 * std::ceil(0.5 * static_cast<double>(k + 1)) + delta * x.sum();
}

// E|V| for V ~ Uniform[-0.1, 0.1]; the conditional Fréchet mean of the
// generated responses is (E|V|)^2 times the squared diagonal profile, since
// the model linearizes on matrix square roots.
constexpr double kMeanAbsScale = 0.05;

Vector draw_covariate(int p, StreamRng& rng) {
  Vector x(p);
  for (int j = 0; j < p; ++j) x(j) = rng.uniform(-1.0, 1.0);
  return x;
}

// Response eigenvalues are (v * profile)^2; entries whose square would sit at
// or below the SPD floor are redrawn (a measure ~1e-5 event, so the scale
// distribution is materially unchanged).
constexpr double kEigenvalueRedrawFloor = 1e-11;

double draw_squared_scale(double profile, StreamRng& rng) {
  for (;;) {
    const double v = rng.uniform(-0.1, 0.1);
    const double root = v * profile;
    if (root * root > kEigenvalueRedrawFloor) return root * root;
  }
}

}  // namespace

void validate_example_config(const ExampleConfig& cfg) {
  if (cfg.n < 2) raise(ErrorKind::InvalidArgument, "example config: n must be >= 2");
  if (cfg.p < 1) raise(ErrorKind::InvalidArgument, "example config: p must be >= 1");
  if (cfg.d < 1) raise(ErrorKind::InvalidArgument, "example config: d must be >= 1");
  const double bound = 2.0 / static_cast<double>(cfg.p);
  if (!(cfg.delta > -bound && cfg.delta < bound))
    raise(ErrorKind::InvalidArgument, "example config: delta must lie in (-2/p, 2/p)");
  if (cfg.which == ExampleConfig::Which::Example2 && cfg.d % 2 != 0)
    raise(ErrorKind::OddDimension, "example 2 requires an even matrix dimension");
}

Matrix haar_orthogonal(int d, StreamRng& rng) {
  if (d < 1) raise(ErrorKind::InvalidArgument, "haar_orthogonal: d must be >= 1");
  Matrix g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

GeneratedData generate_example1(const ExampleConfig& cfg) {
  validate_example_config(cfg);
  if (cfg.which != ExampleConfig::Which::Example1)
    raise(ErrorKind::InvalidArgument, "generate_example1 called with an example-2 config");

  StreamRng basis_rng(cfg.seed, kStreamBasis);
  const Matrix u = haar_orthogonal(cfg.d, basis_rng);

  Matrix covariates(cfg.n, cfg.p);
  std::vector<Matrix> responses(cfg.n);
  for (int i = 0; i < cfg.n; ++i) {
    StreamRng x_rng(cfg.seed, kStreamCovariates, static_cast<std::uint64_t>(i));
    StreamRng v_rng(cfg.seed, kStreamScales, static_cast<std::uint64_t>(i));
    const Vector x = draw_covariate(cfg.p, x_rng);
    covariates.row(i) = x.transpose();

    Vector diag(cfg.d);
    for (int k = 0; k < cfg.d; ++k)
      diag(k) = draw_squared_scale(diag_entry_example1(k, x, cfg.delta), v_rng);
    responses[i] = symmetrized(u * diag.asDiagonal() * u.transpose());
  }

  GeneratedData out;
  out.data = make_dataset(std::move(covariates), responses);
  const double delta = cfg.delta;
  const int d = cfg.d;
  out.true_mean = [u, delta, d](const Vector& x) {
    Vector diag(d);
    for (int k = 0; k < d; ++k) {
      const double root = kMeanAbsScale * diag_entry_example1(k, x, delta);
      diag(k) = root * root;
    }
    return symmetrized(u * diag.asDiagonal() * u.transpose());
  };
  return out;
}

GeneratedData generate_example2(const ExampleConfig& cfg) {
  validate_example_config(cfg);
  if (cfg.which != ExampleConfig::Which::Example2)
    raise(ErrorKind::InvalidArgument, "generate_example2 called with an example-1 config");

  Matrix covariates(cfg.n, cfg.p);
  std::vector<Matrix> responses(cfg.n);
  for (int i = 0; i < cfg.n; ++i) {
    StreamRng x_rng(cfg.seed, kStreamCovariates, static_cast<std::uint64_t>(i));
    StreamRng v_rng(cfg.seed, kStreamScales, static_cast<std::uint64_t>(i));
    StreamRng u_rng(cfg.seed, kStreamBlockBasis, static_cast<std::uint64_t>(i));
    const Vector x = draw_covariate(cfg.p, x_rng);

    Matrix u = Matrix::Zero(cfg.d, cfg.d);
    for (int b = 0; b < cfg.d / 2; ++b) u.block(2 * b, 2 * b, 2, 2) = haar_orthogonal(2, u_rng);
    covariates.row(i) = x.transpose();

    Vector diag(cfg.d);
    for (int k = 0; k < cfg.d; ++k)
      diag(k) = draw_squared_scale(diag_entry_example2(k, x, cfg.delta), v_rng);
    responses[i] = symmetrized(u * diag.asDiagonal() * u.transpose());
  }

  GeneratedData out;
  out.data = make_dataset(std::move(covariates), responses);
  const double delta = cfg.delta;
  const int d = cfg.d;
  out.true_mean = [delta, d](const Vector& x) {
    Vector diag(d);
    for (int k = 0; k < d; ++k) {
      const double root = kMeanAbsScale * diag_entry_example2(k, x, delta);
      diag(k) = root * root;
    }
    return Matrix(diag.asDiagonal());
  };
  return out;
}

GeneratedData generate_example(const ExampleConfig& cfg) {
  return cfg.which == ExampleConfig::Which::Example1 ? generate_example1(cfg)
                                                     : generate_example2(cfg);
}

Dataset surrogate_responses(const Dataset& data, int n_tilde, std::uint64_t seed) {
  validate_dataset(data);
  const Eigen::Index d = data.d();
  if (n_tilde < d)
    raise(ErrorKind::RankDeficientSurrogate,
          "surrogate_responses: n_tilde < d makes sample covariances singular");

  const Eigen::Index n = data.n();
  std::vector<Matrix> surrogates(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    StreamRng rng(seed, kStreamSurrogate, static_cast<std::uint64_t>(i));
    const Matrix root = sqrtm(data.responses[i].mat());
    Matrix sum = Matrix::Zero(d, d);
    Vector g(d);
    for (int j = 0; j < n_tilde; ++j) {
      for (Eigen::Index k = 0; k < d; ++k) g(k) = rng.normal();
      const Vector z = root * g;
      sum.noalias() += z * z.transpose();
    }
    surrogates[i] = symmetrized(sum / static_cast<double>(n_tilde));
  });

  Dataset out;
  out.covariates = data.covariates;
  out.responses.reserve(surrogates.size());
  for (std::size_t i = 0; i < surrogates.size(); ++i) {
    try {
      out.responses.emplace_back(surrogates[i]);
    } catch (const Error&) {
      raise(ErrorKind::RankDeficientSurrogate,
            "surrogate response " + std::to_string(i) + " is numerically singular");
    }
  }
  return out;
}

const char* to_string(ExperimentReport::Kind kind) {
  switch (kind) {
    case ExperimentReport::Kind::QQ: return "qq";
    case ExperimentReport::Kind::Size: return "size";
    case ExperimentReport::Kind::Power: return "power";
    case ExperimentReport::Kind::Coverage: return "coverage";
    case ExperimentReport::Kind::NullQQ: return "null-qq";
  }
  return "unknown";
}

namespace {

nlohmann::ordered_json config_json(const ExampleConfig& cfg) {
  return {{"example", cfg.which == ExampleConfig::Which::Example1 ? 1 : 2},
          {"n", cfg.n},
          {"p", cfg.p},
          {"d", cfg.d},
          {"delta", cfg.delta},
          {"seed", cfg.seed}};
}

struct FailureLog {
  std::vector<std::pair<int, std::string>> entries;

  void check_budget(int trials) const {
    if (entries.size() * 20 >= static_cast<std::size_t>(trials) && !entries.empty())
      raise(ErrorKind::NonConvergence,
            "experiment: " + std::to_string(entries.size()) + " of " + std::to_string(trials) +
                " trials failed (>= 5%); first failure: " + entries.front().second);
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& [trial, message] : entries) out.push_back({{"trial", trial}, {"message", message}});
    return out;
  }
};

std::uint64_t composite_index(std::size_t outer, std::size_t inner) {
  return (static_cast<std::uint64_t>(outer) << 32) | static_cast<std::uint64_t>(inner);
}

}  // namespace

ExperimentReport run_qq_experiment(const ExampleConfig& cfg, int trials, const Vector& x0) {
  validate_example_config(cfg);
  if (trials < 0) raise(ErrorKind::InvalidArgument, "run_qq_experiment: trials must be >= 0");
  if (x0.size() != cfg.p) raise(ErrorKind::DimensionMismatch, "run_qq_experiment: x0 dimension");

  const int d = cfg.d;
  const FitConfig fit_config;
  struct TrialOut {
    std::vector<double> errors;  // upper triangle, row-major over (i >= j)
    std::string failure;
  };
  std::vector<TrialOut> outs(static_cast<std::size_t>(trials));

  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    try {
      ExampleConfig trial_cfg = cfg;
      trial_cfg.seed = derive_seed(cfg.seed, kStreamTrialData, t);
      const GeneratedData gen = generate_example(trial_cfg);
      const MomentEstimates moments = empirical_moments(gen.data, default_rho(gen.data));
      const RegressionFit fitted = fit(x0, gen.data, moments, fit_config);
      if (!fitted.converged) {
        outs[t].failure = "fit did not converge";
        return;
      }
      const CltEstimate clt = clt_covariance(x0, gen.data, fitted, moments);
      const Matrix truth = gen.true_mean(x0);
      const double scale = std::sqrt(static_cast<double>(gen.data.n()));
      for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) {
          const double variance = clt.entry_variances(i, j);
          if (!(variance > 0.0)) {
            outs[t].failure = "zero plug-in variance";
            outs[t].errors.clear();
            return;
          }
          outs[t].errors.push_back(scale * (fitted.estimate.mat()(i, j) - truth(i, j)) /
                                   std::sqrt(variance));
        }
    } catch (const std::exception& e) {
      outs[t].failure = e.what();
    }
  });

  FailureLog failures;
  ExperimentReport report;
  report.kind = ExperimentReport::Kind::QQ;
  report.columns = {"trial", "row", "col", "normalized_error"};
  std::vector<std::vector<double>> per_entry(static_cast<std::size_t>(d * (d + 1) / 2));
  for (int t = 0; t < trials; ++t) {
    if (!outs[t].failure.empty()) {
      failures.entries.emplace_back(t, outs[t].failure);
      continue;
    }
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j <= i; ++j) {
        const double err = outs[t].errors[idx];
        report.rows.push_back({static_cast<double>(t), static_cast<double>(i),
                               static_cast<double>(j), err});
        per_entry[idx].push_back(err);
        ++idx;
      }
  }
  failures.check_budget(trials);

  report.summary_columns = {"row", "col", "count", "ks_distance", "qq_slope", "qq_intercept"};
  std::size_t idx = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) {
      auto& values = per_entry[idx];
      ++idx;
      if (values.size() < 2) continue;
      std::sort(values.begin(), values.end());
      const double ks = ks_statistic(values, [](double v) { return normal_cdf(v); });
      std::vector<double> theo(values.size());
      for (std::size_t r = 0; r < values.size(); ++r)
        theo[r] = normal_quantile((static_cast<double>(r) + 0.5) /
                                  static_cast<double>(values.size()));
      const LineFit line = least_squares_line(theo, values);
      report.summary_rows.push_back({static_cast<double>(i), static_cast<double>(j),
                                     static_cast<double>(values.size()), ks, line.slope,
                                     line.intercept});
    }

  report.metadata = {{"kind", to_string(report.kind)},
                     {"config", config_json(cfg)},
                     {"trials", trials},
                     {"x0", std::vector<double>(x0.data(), x0.data() + x0.size())},
                     {"rho", "1/n"},
                     {"failures", failures.to_json()},
                     {"version", kVersion}};
  return report;
}

ExperimentReport run_size_power(const ExampleConfig& cfg, const std::vector<double>& deltas,
                                int trials, double alpha, int mc, std::uint64_t seed,
                                int n_tilde) {
  if (deltas.empty()) raise(ErrorKind::InvalidArgument, "run_size_power: no effect sizes");
  if (trials < 1) raise(ErrorKind::InvalidArgument, "run_size_power: trials must be >= 1");

  struct TrialOut {
    double statistic = 0.0;
    double quantile = 0.0;
    bool reject = false;
    std::string failure;
  };
  const std::size_t total = deltas.size() * static_cast<std::size_t>(trials);
  std::vector<TrialOut> outs(total);

  parallel_for(total, [&](std::size_t item) {
    const std::size_t delta_idx = item / static_cast<std::size_t>(trials);
    const std::size_t t = item % static_cast<std::size_t>(trials);
    const std::uint64_t composite = composite_index(delta_idx, t);
    try {
      ExampleConfig trial_cfg = cfg;
      trial_cfg.delta = deltas[delta_idx];
      trial_cfg.seed = derive_seed(seed, kStreamTrialData, composite);
      validate_example_config(trial_cfg);
      GeneratedData gen = generate_example(trial_cfg);

      const std::uint64_t mc_seed = derive_seed(seed, kStreamTrialMc, composite);
      TestResult result;
      if (n_tilde > 0) {
        const Dataset surrogate = surrogate_responses(
            gen.data, n_tilde, derive_seed(seed, kStreamTrialSurrogate, composite));
        result = estimated_covariance_test(surrogate, alpha, FitConfig{}, mc, mc_seed);
      } else {
        result = run_test(gen.data, alpha, FitConfig{}, mc, mc_seed);
      }
      outs[item].statistic = result.statistic;
      outs[item].quantile = result.quantile;
      outs[item].reject = result.reject;
    } catch (const std::exception& e) {
      outs[item].failure = e.what();
    }
  });

  FailureLog failures;
  ExperimentReport report;
  report.kind = deltas.size() > 1 ? ExperimentReport::Kind::Power : ExperimentReport::Kind::Size;
  report.columns = {"delta", "trial", "statistic", "quantile", "reject"};
  report.summary_columns = {"delta", "trials", "rejection_rate", "mc_se"};

  std::vector<double> rates;
  for (std::size_t delta_idx = 0; delta_idx < deltas.size(); ++delta_idx) {
    int effective = 0;
    int rejections = 0;
    for (int t = 0; t < trials; ++t) {
      const auto& out = outs[delta_idx * static_cast<std::size_t>(trials) +
                             static_cast<std::size_t>(t)];
      if (!out.failure.empty()) {
        failures.entries.emplace_back(static_cast<int>(delta_idx) * trials + t, out.failure);
        continue;
      }
      ++effective;
      rejections += out.reject ? 1 : 0;
      report.rows.push_back({deltas[delta_idx], static_cast<double>(t), out.statistic,
                             out.quantile, out.reject ? 1.0 : 0.0});
    }
    const double rate = effective > 0 ? static_cast<double>(rejections) / effective : 0.0;
    const double se = effective > 0 ? std::sqrt(rate * (1.0 - rate) / effective) : 0.0;
    rates.push_back(rate);
    report.summary_rows.push_back({deltas[delta_idx], static_cast<double>(effective), rate, se});
  }
  failures.check_budget(static_cast<int>(total));

  report.metadata = {{"kind", to_string(report.kind)},
                     {"config", config_json(cfg)},
                     {"deltas", deltas},
                     {"trials", trials},
                     {"alpha", alpha},
                     {"mc", mc},
                     {"master_seed", seed},
                     {"n_tilde", n_tilde},
                     {"rejection_rates", rates},
                     {"failures", failures.to_json()},
                     {"version", kVersion}};
  return report;
}

ExperimentReport run_null_qq(const ExampleConfig& cfg, int trials, double alpha, int mc,
                             std::uint64_t seed, int n_tilde) {
  if (trials < 2) raise(ErrorKind::InvalidArgument, "run_null_qq: needs at least two trials");

  constexpr std::size_t kPoolPerTrial = 1000;
  struct TrialOut {
    double statistic = 0.0;
    double quantile = 0.0;
    bool reject = false;
    std::vector<double> pool;  // evenly spaced quantiles of the trial's null sample
    std::string failure;
  };
  std::vector<TrialOut> outs(static_cast<std::size_t>(trials));

  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    try {
      ExampleConfig trial_cfg = cfg;
      trial_cfg.seed = derive_seed(seed, kStreamTrialData, t);
      GeneratedData gen = generate_example(trial_cfg);
      Dataset data = std::move(gen.data);
      if (n_tilde > 0)
        data = surrogate_responses(data, n_tilde, derive_seed(seed, kStreamTrialSurrogate, t));

      const MomentEstimates moments = empirical_moments(data, default_rho(data));
      const TestComponents components = test_statistic(data, moments, FitConfig{});
      const Vector lambdas = null_eigenvalues(data, components.barycenter_fit);
      const auto draws = weighted_chisq_draws(lambdas, static_cast<int>(data.p()), mc,
                                              derive_seed(seed, kStreamTrialMc, t));
      outs[t].statistic = components.statistic;
      outs[t].quantile = sorted_quantile(draws, 1.0 - alpha);
      outs[t].reject = outs[t].statistic > outs[t].quantile;
      outs[t].pool.reserve(kPoolPerTrial);
      for (std::size_t k = 0; k < kPoolPerTrial; ++k) {
        const std::size_t pos = static_cast<std::size_t>(
            (static_cast<double>(k) + 0.5) / kPoolPerTrial * draws.size());
        outs[t].pool.push_back(draws[std::min(pos, draws.size() - 1)]);
      }
    } catch (const std::exception& e) {
      outs[t].failure = e.what();
    }
  });

  FailureLog failures;
  std::vector<double> statistics;
  std::vector<double> pooled;
  int rejections = 0;
  ExperimentReport report;
  report.kind = ExperimentReport::Kind::NullQQ;
  report.columns = {"trial", "statistic", "quantile", "reject"};
  for (int t = 0; t < trials; ++t) {
    if (!outs[t].failure.empty()) {
      failures.entries.emplace_back(t, outs[t].failure);
      continue;
    }
    statistics.push_back(outs[t].statistic);
    rejections += outs[t].reject ? 1 : 0;
    pooled.insert(pooled.end(), outs[t].pool.begin(), outs[t].pool.end());
    report.rows.push_back({static_cast<double>(t), outs[t].statistic, outs[t].quantile,
                           outs[t].reject ? 1.0 : 0.0});
  }
  failures.check_budget(trials);
  if (statistics.size() < 2)
    raise(ErrorKind::NonConvergence, "run_null_qq: too few successful trials");

  std::sort(statistics.begin(), statistics.end());
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> theo(statistics.size());
  for (std::size_t r = 0; r < statistics.size(); ++r)
    theo[r] = sorted_quantile(pooled, (static_cast<double>(r) + 0.5) /
                                          static_cast<double>(statistics.size()));
  const LineFit line = least_squares_line(theo, statistics);
  const double null_median = sorted_quantile(pooled, 0.5);
  const double rate = static_cast<double>(rejections) / static_cast<double>(statistics.size());

  report.summary_columns = {"trials", "qq_slope", "qq_intercept", "null_median",
                            "rejection_rate"};
  report.summary_rows.push_back(
      {static_cast<double>(statistics.size()), line.slope, line.intercept, null_median, rate});

  nlohmann::ordered_json qq_pairs = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < statistics.size(); ++r)
    qq_pairs.push_back({{"theoretical", theo[r]}, {"empirical", statistics[r]}});
  report.metadata = {{"kind", to_string(report.kind)},
                     {"config", config_json(cfg)},
                     {"trials", trials},
                     {"alpha", alpha},
                     {"mc", mc},
                     {"master_seed", seed},
                     {"n_tilde", n_tilde},
                     {"qq", qq_pairs},
                     {"failures", failures.to_json()},
                     {"version", kVersion}};
  return report;
}

ExperimentReport run_coverage(const ExampleConfig& cfg, int trials, const Vector& x0,
                              Eigen::Index i, Eigen::Index j, double level) {
  validate_example_config(cfg);
  if (i < 0 || j < 0 || i >= cfg.d || j >= cfg.d)
    raise(ErrorKind::DimensionMismatch, "run_coverage: entry out of range");

  struct TrialOut {
    double lo = 0.0, hi = 0.0, truth = 0.0;
    bool covered = false;
    std::string failure;
  };
  std::vector<TrialOut> outs(static_cast<std::size_t>(trials));

  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    try {
      ExampleConfig trial_cfg = cfg;
      trial_cfg.seed = derive_seed(cfg.seed, kStreamTrialData, t);
      const GeneratedData gen = generate_example(trial_cfg);
      const MomentEstimates moments = empirical_moments(gen.data, default_rho(gen.data));
      const RegressionFit fitted = fit(x0, gen.data, moments, FitConfig{});
      if (!fitted.converged) {
        outs[t].failure = "fit did not converge";
        return;
      }
      const CltEstimate clt = clt_covariance(x0, gen.data, fitted, moments);
      const auto [lo, hi] = confidence_interval(i, j, level, clt, fitted, gen.data.n());
      outs[t].lo = lo;
      outs[t].hi = hi;
      outs[t].truth = gen.true_mean(x0)(i, j);
      outs[t].covered = lo <= outs[t].truth && outs[t].truth <= hi;
    } catch (const std::exception& e) {
      outs[t].failure = e.what();
    }
  });

  FailureLog failures;
  ExperimentReport report;
  report.kind = ExperimentReport::Kind::Coverage;
  report.columns = {"trial", "lo", "hi", "truth", "covered"};
  int covered = 0, effective = 0;
  for (int t = 0; t < trials; ++t) {
    if (!outs[t].failure.empty()) {
      failures.entries.emplace_back(t, outs[t].failure);
      continue;
    }
    ++effective;
    covered += outs[t].covered ? 1 : 0;
    report.rows.push_back({static_cast<double>(t), outs[t].lo, outs[t].hi, outs[t].truth,
                           outs[t].covered ? 1.0 : 0.0});
  }
  failures.check_budget(trials);

  const double rate = effective > 0 ? static_cast<double>(covered) / effective : 0.0;
  report.summary_columns = {"trials", "coverage_rate", "mc_se"};
  report.summary_rows.push_back(
      {static_cast<double>(effective), rate,
       effective > 0 ? std::sqrt(rate * (1.0 - rate) / effective) : 0.0});
  report.metadata = {{"kind", to_string(report.kind)},
                     {"config", config_json(cfg)},
                     {"trials", trials},
                     {"x0", std::vector<double>(x0.data(), x0.data() + x0.size())},
                     {"entry", {i, j}},
                     {"level", level},
                     {"failures", failures.to_json()},
                     {"version", kVersion}};
  return report;
}

namespace {

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::ParseError, "cannot open " + path + " for writing");
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << (c ? "," : "") << columns[c];
  out << "\n";
  char buffer[64];
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", row[c]);
      out << (c ? "," : "") << buffer;
    }
    out << "\n";
  }
}

std::string stem_of(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos) return path;
  return path.substr(0, dot);
}

}  // namespace

void save_report(const ExperimentReport& report, const std::string& csv_path) {
  write_csv(csv_path, report.columns, report.rows);
  const std::string stem = stem_of(csv_path);
  if (!report.summary_rows.empty())
    write_csv(stem + "_summary.csv", report.summary_columns, report.summary_rows);

  nlohmann::ordered_json meta = report.metadata;
  meta["columns"] = report.columns;
  meta["summary_columns"] = report.summary_columns;
  meta["rows"] = report.rows.size();
  std::ofstream out(stem + ".meta.json");
  if (!out) raise(ErrorKind::ParseError, "cannot open " + stem + ".meta.json for writing");
  out << meta.dump(2) << "\n";
}

}  // namespace bwf
