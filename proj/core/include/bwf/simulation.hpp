#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bwf/inference.hpp"
#include "bwf/regression.hpp"
#include "bwf/rng.hpp"

namespace bwf {

/// Synthetic-data configuration for the two generator families: example 1
/// draws one shared Haar eigenbasis per dataset (responses commute), example
/// 2 draws an independent block-rotated basis per sample.
struct ExampleConfig {
  enum class Which { Example1 = 1, Example2 = 2 };
  Which which = Which::Example1;
  int n = 200;
  int p = 5;
  int d = 5;
  double delta = 0.0;  // effect size, must lie in (-2/p, 2/p)
  std::uint64_t seed = 0;
};

void validate_example_config(const ExampleConfig& cfg);

struct GeneratedData {
  Dataset data;
  /// Conditional Fréchet mean x -> Q*(x) of the generating model.
  std::function<Matrix(const Vector&)> true_mean;
};

/// Haar-distributed orthogonal matrix (QR of an i.i.d. Gaussian matrix with
/// the R-diagonal sign correction).
Matrix haar_orthogonal(int d, StreamRng& rng);

GeneratedData generate_example1(const ExampleConfig& cfg);
GeneratedData generate_example2(const ExampleConfig& cfg);
GeneratedData generate_example(const ExampleConfig& cfg);

/// Replaces each response Q_i by the sample covariance of n_tilde fresh
/// N(0, Q_i) draws. Requires n_tilde >= d; a numerically singular surrogate
/// raises RankDeficientSurrogate.
Dataset surrogate_responses(const Dataset& data, int n_tilde, std::uint64_t seed);

struct ExperimentReport {
  enum class Kind { QQ, Size, Power, Coverage, NullQQ };
  Kind kind = Kind::QQ;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> summary_columns;
  std::vector<std::vector<double>> summary_rows;
  nlohmann::ordered_json metadata;
};

const char* to_string(ExperimentReport::Kind kind);

/// Normalized-error study for the CLT at x0: one row per (trial, upper-
/// triangle entry) holding sqrt(n) (Qhat(x0) - Q*(x0))_ij / sqrt(v_ij).
/// Individual trial failures are tolerated below 5% and recorded in the
/// metadata.
ExperimentReport run_qq_experiment(const ExampleConfig& cfg, int trials, const Vector& x0);

/// Rejection-rate table over effect sizes. Per-trial rows carry
/// (delta, trial, statistic, quantile, reject); per-delta rates land in the
/// summary. n_tilde > 0 switches to sample-covariance surrogates.
ExperimentReport run_size_power(const ExampleConfig& cfg, const std::vector<double>& deltas,
                                int trials, double alpha, int mc, std::uint64_t seed,
                                int n_tilde = 0);

/// Null-distribution study: per-trial statistic, plug-in quantile and
/// rejection, plus a Q-Q comparison of the statistics against the pooled
/// plug-in null (slope/intercept/median in the summary).
ExperimentReport run_null_qq(const ExampleConfig& cfg, int trials, double alpha, int mc,
                             std::uint64_t seed, int n_tilde = 0);

/// Empirical coverage of the pointwise confidence interval for entry (i, j)
/// of Q*(x0).
ExperimentReport run_coverage(const ExampleConfig& cfg, int trials, const Vector& x0,
                              Eigen::Index i, Eigen::Index j, double level);

/// Writes <path> (rows), a *_summary.csv sidecar when summary rows exist,
/// and a *.meta.json sidecar with the full configuration and seeds. Values
/// print with 17 significant digits; identical reports produce identical
/// bytes.
void save_report(const ExperimentReport& report, const std::string& csv_path);

}  // namespace bwf
