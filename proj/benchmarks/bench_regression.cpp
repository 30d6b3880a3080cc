#include <benchmark/benchmark.h>

#include <bwf/inference.hpp>
#include <bwf/regression.hpp>
#include <bwf/simulation.hpp>

namespace {

bwf::GeneratedData make_data(int n, int d) {
  bwf::ExampleConfig cfg;
  cfg.n = n;
  cfg.p = 5;
  cfg.d = d;
  cfg.seed = 42;
  return bwf::generate_example1(cfg);
}

void BM_Fit(benchmark::State& state) {
  const auto gen = make_data(static_cast<int>(state.range(0)), 5);
  const auto moments = bwf::empirical_moments(gen.data, bwf::default_rho(gen.data));
  const bwf::Vector x = bwf::Vector::Zero(5);
  for (auto _ : state) benchmark::DoNotOptimize(bwf::fit(x, gen.data, moments));
}
BENCHMARK(BM_Fit)->Arg(50)->Arg(100)->Arg(200);

void BM_CltCovariance(benchmark::State& state) {
  const auto gen = make_data(200, 5);
  const auto moments = bwf::empirical_moments(gen.data, bwf::default_rho(gen.data));
  const bwf::Vector x = bwf::Vector::Zero(5);
  const auto fitted = bwf::fit(x, gen.data, moments);
  for (auto _ : state)
    benchmark::DoNotOptimize(bwf::clt_covariance(x, gen.data, fitted, moments));
}
BENCHMARK(BM_CltCovariance);

void BM_TestStatistic(benchmark::State& state) {
  const auto gen = make_data(static_cast<int>(state.range(0)), 3);
  const auto moments = bwf::empirical_moments(gen.data, bwf::default_rho(gen.data));
  for (auto _ : state)
    benchmark::DoNotOptimize(bwf::test_statistic(gen.data, moments));
}
BENCHMARK(BM_TestStatistic)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_WeightedChisqQuantile(benchmark::State& state) {
  bwf::Vector lambdas(15);
  for (int i = 0; i < 15; ++i) lambdas(i) = 1.0 / (1.0 + i);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        bwf::weighted_chisq_quantile(lambdas, 5, 0.05, static_cast<int>(state.range(0)), 7));
}
BENCHMARK(BM_WeightedChisqQuantile)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
