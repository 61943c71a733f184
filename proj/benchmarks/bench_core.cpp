#include <benchmark/benchmark.h>

#include "softcover/codebook.hpp"
#include "softcover/exponents.hpp"
#include "softcover/gaussian_demo.hpp"

using namespace softcover;

namespace {

void BM_InducedDistribution(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto qx = FiniteDistribution::uniform(2);
  const auto ch = binary_symmetric_channel(0.2);
  const auto cb = sample_codebook(qx, n, 0.9, 1);
  for (auto _ : state) benchmark::DoNotOptimize(induced_distribution(cb, ch));
  state.SetComplexityN(1LL << n);
}
BENCHMARK(BM_InducedDistribution)->DenseRange(8, 16, 4)->Complexity();

void BM_SoftCoverReport(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto path = static_cast<ReportPath>(state.range(1));
  const auto qx = FiniteDistribution::uniform(2);
  const auto ch = binary_symmetric_channel(0.2);
  const auto cb = sample_codebook(qx, n, 0.9, 1);
  for (auto _ : state) benchmark::DoNotOptimize(soft_cover_report(cb, qx, ch, 0.1, path));
}
BENCHMARK(BM_SoftCoverReport)
    ->ArgsProduct({{8, 12, 14}, {static_cast<long>(ReportPath::Generic), static_cast<long>(ReportPath::BinarySymmetric)}})
    ->ArgNames({"n", "path"});

void BM_GammaDelta(benchmark::State& state) {
  const auto qx = FiniteDistribution({0.3, 0.7});
  const Channel ch({{0.8, 0.15, 0.05}, {0.1, 0.3, 0.6}});
  for (auto _ : state) benchmark::DoNotOptimize(gamma_delta(qx, ch, 1.2, 0.05));
}
BENCHMARK(BM_GammaDelta);

void BM_MixtureTv(benchmark::State& state) {
  gaussian::GaussianSetup setup;
  setup.dim = static_cast<int>(state.range(0));
  setup.b = static_cast<int>(state.range(1));
  const auto cb = gaussian::sample_gaussian_codebook(setup);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian::mixture_tv(cb, setup));
}
BENCHMARK(BM_MixtureTv)->Args({1, 5})->Args({1, 32})->Args({2, 32})->ArgNames({"dim", "b"})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
