// Command line front end for Bures-Wasserstein Fréchet regression: fitting,
// the Wasserstein F-test, pointwise confidence intervals, and the simulation
// drivers. Results are written as JSON; experiment tables as CSV.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bwf/dataset_io.hpp"
#include "bwf/inference.hpp"
#include "bwf/regression.hpp"
#include "bwf/simulation.hpp"
#include "bwf/version.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitDataError = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitNumericalBreakdown = 4;

// Loader failures are data errors regardless of kind.
struct LoadError {
  bwf::Error error;
};

bwf::Dataset load_or_wrap(const std::string& covariates_path, const std::string& responses_path) {
  try {
    return bwf::load_dataset(covariates_path, responses_path);
  } catch (const bwf::Error& e) {
    throw LoadError{e};
  }
}

int exit_code_for(const bwf::Error& e) {
  switch (e.kind()) {
    case bwf::ErrorKind::NonConvergence:
      return kExitNonConvergence;
    case bwf::ErrorKind::NotPositiveDefinite:
    case bwf::ErrorKind::NumericalBreakdown:
    case bwf::ErrorKind::SingularCovariance:
    case bwf::ErrorKind::SingularOperator:
      return kExitNumericalBreakdown;
    default:
      return kExitDataError;
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

ordered_json matrix_json(const bwf::Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

ordered_json vector_json(const bwf::Vector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

// The timestamp is the only nondeterministic field and always sits last;
// everything above it is a pure function of the inputs.
void emit(ordered_json body, const std::string& out_path) {
  body["timestamp"] = utc_timestamp();
  const std::string text = body.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot open " << out_path << " for writing\n";
    std::exit(kExitDataError);
  }
  out << text;
}

bwf::Vector parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string field;
  while (std::getline(stream, field, ',')) {
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      bwf::raise(bwf::ErrorKind::InvalidArgument, "cannot parse '" + field + "' as a number");
    }
  }
  if (values.empty()) bwf::raise(bwf::ErrorKind::InvalidArgument, "empty numeric list");
  bwf::Vector out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) out(static_cast<Eigen::Index>(i)) = values[i];
  return out;
}

struct CommonOptions {
  std::string covariates_path;
  std::string responses_path;
  std::string x_text;
  std::string rho_text = "auto";
  double alpha = 0.05;
  double eta = 1.0;
  int max_iters = 30;
  double eps = 1e-6;
  std::string init_text = "identity";
  int mc = bwf::kDefaultMcSamples;
  std::uint64_t seed = 0;
  std::string out_path;
};

std::optional<double> parse_rho(const std::string& text, Eigen::Index n) {
  if (text == "auto") return 1.0 / static_cast<double>(n);
  if (text == "zero") return 0.0;
  try {
    const double value = std::stod(text);
    if (value < 0.0) throw std::invalid_argument("negative");
    return value;
  } catch (const std::exception&) {
    bwf::raise(bwf::ErrorKind::InvalidArgument,
               "--rho must be 'auto', 'zero' or a nonnegative number");
  }
}

bwf::FitConfig fit_config_from(const CommonOptions& opt) {
  bwf::FitConfig config;
  config.eta = opt.eta;
  config.max_iters = opt.max_iters;
  config.eps = opt.eps;
  if (opt.init_text == "identity")
    config.init = bwf::FitConfig::Init::Identity;
  else if (opt.init_text == "mean")
    config.init = bwf::FitConfig::Init::Mean;
  else
    bwf::raise(bwf::ErrorKind::InvalidArgument, "--init must be 'identity' or 'mean'");
  return config;
}

ordered_json inputs_json(const CommonOptions& opt, const std::string& command) {
  return {{"command", command},
          {"covariates", opt.covariates_path},
          {"responses", opt.responses_path},
          {"x", opt.x_text},
          {"rho", opt.rho_text},
          {"alpha", opt.alpha},
          {"eta", opt.eta},
          {"max_iters", opt.max_iters},
          {"eps", opt.eps},
          {"init", opt.init_text},
          {"mc", opt.mc},
          {"seed", opt.seed}};
}

ordered_json fit_diagnostics(const bwf::RegressionFit& fit) {
  return {{"converged", fit.converged},
          {"iters", fit.iters},
          {"grad_norm", fit.grad_norm},
          {"clamped_steps", fit.clamped_steps}};
}

int run_fit(const CommonOptions& opt) {
  const bwf::Dataset data = load_or_wrap(opt.covariates_path, opt.responses_path);
  const auto rho = parse_rho(opt.rho_text, data.n());
  const bwf::MomentEstimates moments = bwf::empirical_moments(data, *rho);
  const bwf::FitConfig config = fit_config_from(opt);

  const bwf::Vector x =
      opt.x_text.empty() ? bwf::Vector(data.covariates.colwise().mean().transpose())
                         : parse_vector(opt.x_text);
  const bwf::RegressionFit fit = bwf::fit(x, data, moments, config);

  ordered_json body;
  body["command"] = "fit";
  body["version"] = bwf::kVersion;
  body["inputs"] = inputs_json(opt, "fit");
  body["result"] = {{"x", vector_json(x)},
                    {"rho", *rho},
                    {"estimate", matrix_json(fit.estimate.mat())}};
  body["diagnostics"] = fit_diagnostics(fit);
  emit(std::move(body), opt.out_path);
  return fit.converged ? kExitOk : kExitNonConvergence;
}

int run_test_cmd(const CommonOptions& opt) {
  const bwf::Dataset data = load_or_wrap(opt.covariates_path, opt.responses_path);
  const auto rho = parse_rho(opt.rho_text, data.n());
  const bwf::FitConfig config = fit_config_from(opt);
  const bwf::TestResult result =
      bwf::run_test(data, opt.alpha, config, opt.mc, opt.seed, rho);

  ordered_json body;
  body["command"] = "test";
  body["version"] = bwf::kVersion;
  body["inputs"] = inputs_json(opt, "test");
  body["result"] = {{"statistic", result.statistic},
                    {"eigenvalues", vector_json(result.eigenvalues)},
                    {"p_dof", result.p_dof},
                    {"quantile", result.quantile},
                    {"p_value", result.p_value},
                    {"reject", result.reject},
                    {"mc_samples", result.mc_samples},
                    {"seed", result.seed},
                    {"rho", *rho}};
  emit(std::move(body), opt.out_path);
  return kExitOk;
}

int run_ci(const CommonOptions& opt) {
  const bwf::Dataset data = load_or_wrap(opt.covariates_path, opt.responses_path);
  const auto rho = parse_rho(opt.rho_text, data.n());
  const bwf::MomentEstimates moments = bwf::empirical_moments(data, *rho);
  const bwf::FitConfig config = fit_config_from(opt);
  const bwf::Vector x =
      opt.x_text.empty() ? bwf::Vector(data.covariates.colwise().mean().transpose())
                         : parse_vector(opt.x_text);
  const bwf::RegressionFit fit = bwf::fit(x, data, moments, config);
  const bwf::CltEstimate clt = bwf::clt_covariance(x, data, fit, moments);

  const double level = 1.0 - opt.alpha;
  const Eigen::Index d = data.d();
  bwf::Matrix lo(d, d), hi(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto interval = bwf::confidence_interval(i, j, level, clt, fit, data.n());
      lo(i, j) = interval.first;
      hi(i, j) = interval.second;
    }

  ordered_json body;
  body["command"] = "ci";
  body["version"] = bwf::kVersion;
  body["inputs"] = inputs_json(opt, "ci");
  body["result"] = {{"x", vector_json(x)},
                    {"rho", *rho},
                    {"level", level},
                    {"estimate", matrix_json(fit.estimate.mat())},
                    {"lower", matrix_json(lo)},
                    {"upper", matrix_json(hi)},
                    {"entry_variances", matrix_json(clt.entry_variances)}};
  body["diagnostics"] = fit_diagnostics(fit);
  emit(std::move(body), opt.out_path);
  return kExitOk;
}

struct SimulateOptions {
  std::string experiment = "size";
  int example = 1;
  int n = 200;
  int p = 5;
  int d = 5;
  std::string delta_text = "0";
  int trials = 100;
  double alpha = 0.05;
  int mc = bwf::kDefaultMcSamples;
  std::uint64_t seed = 0;
  int ntilde = 0;
  std::string x0_text;
  std::string entry_text = "0,0";
  std::string out_path;
  std::string report_csv;
};

int run_simulate(const SimulateOptions& opt) {
  bwf::ExampleConfig cfg;
  cfg.which = opt.example == 1 ? bwf::ExampleConfig::Which::Example1
                               : bwf::ExampleConfig::Which::Example2;
  cfg.n = opt.n;
  cfg.p = opt.p;
  cfg.d = opt.d;
  cfg.seed = opt.seed;

  const bwf::Vector deltas_vec = parse_vector(opt.delta_text);
  std::vector<double> deltas(deltas_vec.data(), deltas_vec.data() + deltas_vec.size());
  cfg.delta = deltas.front();
  bwf::validate_example_config(cfg);

  const bwf::Vector x0 = opt.x0_text.empty() ? bwf::Vector(bwf::Vector::Zero(cfg.p))
                                             : parse_vector(opt.x0_text);

  std::string csv = opt.report_csv;
  if (csv.empty()) {
    const auto dot = opt.out_path.rfind('.');
    csv = (opt.out_path.empty() ? std::string("report") : opt.out_path.substr(0, dot)) + ".csv";
  }

  bwf::ExperimentReport report;
  if (opt.experiment == "qq") {
    report = bwf::run_qq_experiment(cfg, opt.trials, x0);
  } else if (opt.experiment == "size" || opt.experiment == "power") {
    report = bwf::run_size_power(cfg, deltas, opt.trials, opt.alpha, opt.mc, opt.seed,
                                 opt.ntilde);
  } else if (opt.experiment == "null-qq") {
    report = bwf::run_null_qq(cfg, opt.trials, opt.alpha, opt.mc, opt.seed, opt.ntilde);
  } else if (opt.experiment == "coverage") {
    const bwf::Vector entry = parse_vector(opt.entry_text);
    if (entry.size() != 2)
      bwf::raise(bwf::ErrorKind::InvalidArgument, "--entry must be 'row,col'");
    report = bwf::run_coverage(cfg, opt.trials, x0, static_cast<Eigen::Index>(entry(0)),
                               static_cast<Eigen::Index>(entry(1)), 1.0 - opt.alpha);
  } else {
    bwf::raise(bwf::ErrorKind::InvalidArgument,
               "--experiment must be one of qq, size, power, null-qq, coverage");
  }
  bwf::save_report(report, csv);

  ordered_json summary = ordered_json::array();
  for (const auto& row : report.summary_rows) summary.push_back(row);

  ordered_json body;
  body["command"] = "simulate";
  body["version"] = bwf::kVersion;
  body["inputs"] = {{"experiment", opt.experiment}, {"example", opt.example},
                    {"n", opt.n},                   {"p", opt.p},
                    {"d", opt.d},                   {"delta", opt.delta_text},
                    {"trials", opt.trials},         {"alpha", opt.alpha},
                    {"mc", opt.mc},                 {"seed", opt.seed},
                    {"ntilde", opt.ntilde},         {"x0", opt.x0_text},
                    {"entry", opt.entry_text}};
  body["result"] = {{"report_csv", csv},
                    {"summary_columns", report.summary_columns},
                    {"summary", summary}};
  emit(std::move(body), opt.out_path);
  return kExitOk;
}

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool needs_data) {
  auto* cov = cmd->add_option("--covariates", opt.covariates_path, "Covariates CSV path");
  auto* resp = cmd->add_option("--responses", opt.responses_path, "Responses CSV path");
  if (needs_data) {
    cov->required();
    resp->required();
  }
  cmd->add_option("--x", opt.x_text, "Evaluation point, comma separated (default: X-bar)");
  cmd->add_option("--alpha", opt.alpha, "Test level / interval complement");
  cmd->add_option("--rho", opt.rho_text, "Ridge policy: auto (=1/n), zero, or a number");
  cmd->add_option("--eta", opt.eta, "Gradient descent step size");
  cmd->add_option("--max-iters", opt.max_iters, "Iteration budget");
  cmd->add_option("--eps", opt.eps, "Gradient-norm stopping threshold");
  cmd->add_option("--init", opt.init_text, "Initialization: identity or mean");
  cmd->add_option("--mc", opt.mc, "Monte-Carlo draws for the null quantile");
  cmd->add_option("--seed", opt.seed, "Random seed");
  cmd->add_option("--out", opt.out_path, "Result JSON path (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fréchet regression for SPD matrix responses under the Bures-Wasserstein metric"};
  app.require_subcommand(1);

  CommonOptions fit_opt, test_opt, ci_opt;
  SimulateOptions sim_opt;

  CLI::App* cmd_fit = app.add_subcommand("fit", "Fit the regression at a covariate point");
  add_common_flags(cmd_fit, fit_opt, true);

  CLI::App* cmd_test = app.add_subcommand("test", "Wasserstein F-test of no covariate effect");
  add_common_flags(cmd_test, test_opt, true);

  CLI::App* cmd_ci = app.add_subcommand("ci", "Pointwise confidence intervals for all entries");
  add_common_flags(cmd_ci, ci_opt, true);

  CLI::App* cmd_sim = app.add_subcommand("simulate", "Synthetic-data experiments");
  cmd_sim->add_option("--experiment", sim_opt.experiment,
                      "qq, size, power, null-qq, or coverage");
  cmd_sim->add_option("--example", sim_opt.example, "Generator family: 1 or 2")
      ->check(CLI::IsMember({1, 2}));
  cmd_sim->add_option("--n", sim_opt.n, "Sample size");
  cmd_sim->add_option("--p", sim_opt.p, "Covariate dimension");
  cmd_sim->add_option("--d", sim_opt.d, "Matrix dimension");
  cmd_sim->add_option("--delta", sim_opt.delta_text, "Effect size(s), comma separated");
  cmd_sim->add_option("--trials", sim_opt.trials, "Monte-Carlo replicates");
  cmd_sim->add_option("--alpha", sim_opt.alpha, "Test level");
  cmd_sim->add_option("--mc", sim_opt.mc, "Null-quantile Monte-Carlo draws");
  cmd_sim->add_option("--seed", sim_opt.seed, "Master seed");
  cmd_sim->add_option("--ntilde", sim_opt.ntilde,
                      "Surrogate sample size per response (0 = exact responses)");
  cmd_sim->add_option("--x0", sim_opt.x0_text, "Evaluation point for qq/coverage");
  cmd_sim->add_option("--entry", sim_opt.entry_text, "Matrix entry row,col for coverage");
  cmd_sim->add_option("--out", sim_opt.out_path, "Result JSON path (default: stdout)");
  cmd_sim->add_option("--report-csv", sim_opt.report_csv, "Report CSV path");

  CLI11_PARSE(app, argc, argv);

  std::string out_path;
  std::string command;
  try {
    if (cmd_fit->parsed()) {
      out_path = fit_opt.out_path;
      command = "fit";
      return run_fit(fit_opt);
    }
    if (cmd_test->parsed()) {
      out_path = test_opt.out_path;
      command = "test";
      return run_test_cmd(test_opt);
    }
    if (cmd_ci->parsed()) {
      out_path = ci_opt.out_path;
      command = "ci";
      return run_ci(ci_opt);
    }
    out_path = sim_opt.out_path;
    command = "simulate";
    return run_simulate(sim_opt);
  } catch (const LoadError& wrapped) {
    ordered_json body;
    body["command"] = command;
    body["version"] = bwf::kVersion;
    body["error"] = {{"kind", bwf::to_string(wrapped.error.kind())},
                     {"message", wrapped.error.what()}};
    emit(std::move(body), out_path);
    std::cerr << "error: " << wrapped.error.what() << "\n";
    return kExitDataError;
  } catch (const bwf::Error& e) {
    ordered_json body;
    body["command"] = command;
    body["version"] = bwf::kVersion;
    body["error"] = {{"kind", bwf::to_string(e.kind())}, {"message", e.what()}};
    emit(std::move(body), out_path);
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    ordered_json body;
    body["command"] = command;
    body["version"] = bwf::kVersion;
    body["error"] = {{"kind", "Internal"}, {"message", e.what()}};
    emit(std::move(body), out_path);
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalBreakdown;
  }
}
