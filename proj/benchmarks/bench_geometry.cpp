#include <benchmark/benchmark.h>

#include <bwf/geometry.hpp>
#include <bwf/rng.hpp>
#include <bwf/simulation.hpp>

namespace {

bwf::Matrix random_spd(int d, bwf::StreamRng& rng) {
  const bwf::Matrix u = bwf::haar_orthogonal(d, rng);
  bwf::Vector eigs(d);
  for (int k = 0; k < d; ++k) eigs(k) = rng.uniform(0.5, 2.5);
  return bwf::symmetrized(u * eigs.asDiagonal() * u.transpose());
}

void BM_Sqrtm(benchmark::State& state) {
  bwf::StreamRng rng(1);
  const bwf::Matrix a = random_spd(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(bwf::sqrtm(a));
}
BENCHMARK(BM_Sqrtm)->Arg(5)->Arg(10)->Arg(20)->Arg(40);

void BM_BwDistance(benchmark::State& state) {
  bwf::StreamRng rng(2);
  const bwf::Matrix a = random_spd(static_cast<int>(state.range(0)), rng);
  const bwf::Matrix b = random_spd(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(bwf::bw_distance(a, b));
}
BENCHMARK(BM_BwDistance)->Arg(5)->Arg(10)->Arg(20);

void BM_OtMap(benchmark::State& state) {
  bwf::StreamRng rng(3);
  const bwf::Matrix q = random_spd(static_cast<int>(state.range(0)), rng);
  const bwf::Matrix s = random_spd(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(bwf::ot_map(q, s));
}
BENCHMARK(BM_OtMap)->Arg(5)->Arg(10)->Arg(20);

void BM_DtOperator(benchmark::State& state) {
  bwf::StreamRng rng(4);
  const bwf::Matrix q = random_spd(static_cast<int>(state.range(0)), rng);
  const bwf::Matrix s = random_spd(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(bwf::dt_operator(q, s));
}
BENCHMARK(BM_DtOperator)->Arg(5)->Arg(10);

}  // namespace
