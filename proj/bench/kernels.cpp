// Serial reference against the OpenMP kernels: one solver step and the exact
// distance transform. Argument is the grid side in cells.

#include <benchmark/benchmark.h>

#include <random>

#include "rds/geometry.hpp"
#include "rds/solver.hpp"

namespace {

rds::Field front_field(std::size_t n) {
  const double h = 0.25;
  const auto g = rds::Grid::plane({0.0, h * (n - 1), 0.0, h * (n - 1)}, h);
  return rds::rasterize_initial(rds::SupportSpec::ball({h * n / 2, h * n / 2}, h * n / 4), g,
                                rds::ReactionTerm::kpp_logistic());
}

void step_kernel(benchmark::State& state, rds::Exec exec) {
  auto f = front_field(static_cast<std::size_t>(state.range(0)));
  const double dt = rds::cfl_bound(f.grid);
  for (auto _ : state) {
    rds::step(f, dt, exec);
    benchmark::DoNotOptimize(f.u.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.u.size()));
}

void edt_kernel(benchmark::State& state, rds::Exec exec) {
  const auto n = static_cast<std::size_t>(state.range(0));
  rds::RasterMask m({0.0, 0.0}, 1.0, n, n);
  std::mt19937 rng(7);
  std::bernoulli_distribution occupied(0.01);
  for (auto& c : m.cells()) c = occupied(rng) ? 1 : 0;
  for (auto _ : state) benchmark::DoNotOptimize(rds::distance_transform(m, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.size()));
}

void BM_StepSerial(benchmark::State& s) { step_kernel(s, rds::Exec::serial); }
void BM_StepParallel(benchmark::State& s) { step_kernel(s, rds::Exec::parallel); }
void BM_DistanceTransformSerial(benchmark::State& s) { edt_kernel(s, rds::Exec::serial); }
void BM_DistanceTransformParallel(benchmark::State& s) { edt_kernel(s, rds::Exec::parallel); }

}  // namespace

BENCHMARK(BM_StepSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_StepParallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_DistanceTransformSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_DistanceTransformParallel)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
