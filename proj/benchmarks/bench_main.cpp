#include <benchmark/benchmark.h>

#include "jsrcert/families.hpp"
#include "jsrcert/jsr_bounds.hpp"
#include "jsrcert/polytope.hpp"
#include "jsrcert/quadratic.hpp"
#include "jsrcert/sos.hpp"

namespace {

using namespace jsrcert;

void BM_ExhaustiveBracket(benchmark::State& state) {
  const MatrixSet set = blondel_et_al(0.7);
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive_bracket(set, depth));
  state.SetItemsProcessed(state.iterations() * ((std::int64_t{1} << (depth + 1)) - 2));
}
BENCHMARK(BM_ExhaustiveBracket)->DenseRange(8, 16, 4);

void BM_Gripenberg(benchmark::State& state) {
  const MatrixSet set = blondel_et_al(0.7);
  GripenbergOptions opt;
  opt.delta = 0.02;
  for (auto _ : state) benchmark::DoNotOptimize(gripenberg(set, opt));
}
BENCHMARK(BM_Gripenberg);

void BM_SosDegree(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const MatrixSet set = lagarias_wang_experiment(k);
  const int degree = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sos_lyapunov_feasible(set, degree, 1.0));
}
BENCHMARK(BM_SosDegree)->Args({2, 6})->Args({4, 14})->Args({6, 20});

void BM_MaxOfQuadratics(benchmark::State& state) {
  const MatrixSet set = lagarias_wang_experiment(4);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(max_of_quadratics(set, order, 1.0));
}
BENCHMARK(BM_MaxOfQuadratics)->DenseRange(1, 5);

void BM_InvariantPolytope(benchmark::State& state) {
  const MatrixSet set = lagarias_wang_experiment(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(invariant_polytope_iterate(set, 1.0, 2000));
}
BENCHMARK(BM_InvariantPolytope)->DenseRange(2, 6, 2);

}  // namespace

BENCHMARK_MAIN();
