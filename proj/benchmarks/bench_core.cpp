#include <benchmark/benchmark.h>

#include "valsim/valsim.hpp"

namespace {

using namespace valsim;

CorrelationMatrix equicorrelated(Eigen::Index p, double r) {
  Matrix m = Matrix::Constant(p, p, r);
  m.diagonal().setOnes();
  return CorrelationMatrix(m);
}

void BM_GramFactor(benchmark::State& state) {
  const CorrelationMatrix sigma = equicorrelated(state.range(0), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(gram_factor(sigma));
}
BENCHMARK(BM_GramFactor)->Arg(3)->Arg(6)->Arg(12);

void BM_MvnSample(benchmark::State& state) {
  const GramFactor factor = gram_factor(equicorrelated(3, 0.3));
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mvn_sample(factor, state.range(0), {1, stream++}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MvnSample)->Arg(100)->Arg(1000)->Arg(10000);

void BM_MultipleCorrelations(benchmark::State& state) {
  const CorrelationMatrix sigma = equicorrelated(state.range(0), 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(multiple_correlations(sigma));
}
BENCHMARK(BM_MultipleCorrelations)->Arg(3)->Arg(6);

void BM_RunCell(benchmark::State& state) {
  SimDesign design;
  design.sigma = two_predictor_matrix(0.6, {0.2, 0.3});
  design.nss = 40;
  design.sss = 25;
  design.replications = 50;
  for (auto _ : state) benchmark::DoNotOptimize(run_cell(design));
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_RunCell)->Unit(benchmark::kMillisecond);

void BM_BinormUpper(benchmark::State& state) {
  const double rho = state.range(0) / 100.0;
  double h = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(binorm_upper(h, 0.4, rho));
    h = h > 1.0 ? -1.0 : h + 0.01;
  }
}
BENCHMARK(BM_BinormUpper)->Arg(15)->Arg(50)->Arg(95);

}  // namespace

BENCHMARK_MAIN();
