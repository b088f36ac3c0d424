#include <map>
#include <random>

#include <benchmark/benchmark.h>

#include "hyplab/heat_lp.hpp"
#include "hyplab/highlow.hpp"
#include "hyplab/sampling.hpp"

using namespace hyplab;

namespace {

const SpectralOperator& op_for(std::size_t n) {
  static std::map<std::size_t, SpectralOperator> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_operator(make_grid({GeometryKind::Hyperbolic2}, 15.0, n))).first;
  return it->second;
}

RadialField sample_field(const SpectralOperator& op) {
  std::mt19937_64 rng(1);
  return random_smooth_field(op.grid(), rng);
}

void BM_BuildOperator(benchmark::State& state) {
  const RadialGrid grid = make_grid({GeometryKind::Hyperbolic2}, 15.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_operator(grid));
}
BENCHMARK(BM_BuildOperator)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ApplyHeat(benchmark::State& state) {
  const auto& op = op_for(static_cast<std::size_t>(state.range(0)));
  const RadialField f = sample_field(op);
  for (auto _ : state) benchmark::DoNotOptimize(heat(op, 0.01, f));
}
BENCHMARK(BM_ApplyHeat)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_Ladder(benchmark::State& state) {
  const auto& op = op_for(512);
  const RadialField f = sample_field(op);
  for (auto _ : state) benchmark::DoNotOptimize(make_ladder(op, f, 64));
}
BENCHMARK(BM_Ladder)->Unit(benchmark::kMillisecond);

void BM_NlsStep(benchmark::State& state) {
  const auto& op = op_for(static_cast<std::size_t>(state.range(0)));
  FlowConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.1;
  cfg.record_every = 100;
  const RadialField f = sample_field(op);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_nls(op, f, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.steps()));
}
BENCHMARK(BM_NlsStep)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_BatchedStrangStep(benchmark::State& state) {
  const auto& op = op_for(512);
  const Eigen::Index cols = state.range(0);
  Eigen::MatrixXcd fields(op.size(), cols);
  for (Eigen::Index c = 0; c < cols; ++c) fields.col(c) = sample_field(op);
  Eigen::MatrixXcd coeffs = op.analyze_columns(fields);
  const Eigen::VectorXcd half = linear_phase(op, 5e-4);
  for (auto _ : state) strang_step(op, half, coeffs, 1e-3, 3);
}
BENCHMARK(BM_BatchedStrangStep)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

void BM_HighLowRun(benchmark::State& state) {
  const auto& op = op_for(256);
  const RadialField phi = make_rough_datum(op, 0.9, 1, 1.0);
  HighLowConfig cfg;
  cfg.flow.t_end = 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(run_highlow(op, phi, cfg));
}
BENCHMARK(BM_HighLowRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
