#include <benchmark/benchmark.h>

#include <random>

#include "nilnf/normalform.hpp"

using namespace nilnf;
using Q = RadScalar;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

const Sl2Triple<Q>& triple3() {
  static const Sl2Triple<Q> t = build_triple<Q>(JordanType{{3}});
  return t;
}

// Dense rational matrix with entries in [-9, 9].
Matrix<Q> random_matrix(std::size_t rows, std::size_t cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> d(-9, 9);
  Matrix<Q> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = Q(d(rng));
  return m;
}

void BM_rref(benchmark::State& state) {
  Matrix<Q> base = random_matrix(40, 60, 7);
  for (auto _ : state) {
    Matrix<Q> m = base;
    benchmark::DoNotOptimize(rref(m, exec_of(state)));
  }
}

void BM_decompose(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(decompose_uncached(triple3(), SliceBasis::Kind::VectorFields, 4, exec_of(state)));
}

void BM_first_integrals(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(first_integrals(triple3(), 6, exec_of(state)));
}

void BM_first_integrals_of_field(benchmark::State& state) {
  using P = Poly<Q>;
  P x = P::variable(3, 0), y = P::variable(3, 1), z = P::variable(3, 2);
  VectorField<Q> v(std::vector<P>{y - x * x + x * x * x, z + Q(2) * x * x * x * x, P(3)});
  for (auto _ : state) benchmark::DoNotOptimize(first_integrals_of_field(v, 5, -1, exec_of(state)));
}

}  // namespace

// Argument 0 runs the serial reference, 1 the OpenMP kernel.
BENCHMARK(BM_rref)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_decompose)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_first_integrals)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_first_integrals_of_field)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
