#include <benchmark/benchmark.h>

#include <cmath>

#include "cmix/commutator_engine.hpp"
#include "cmix/mixing_analyzer.hpp"
#include "cmix/random.hpp"
#include "cmix/skew_products.hpp"

using namespace cmix;

namespace {

void birkhoff_discrete_bench(benchmark::State& state) {
  const auto dim = static_cast<Eigen::Index>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  Rng rng(1);
  const OperatorPair pair = OperatorPair::discrete(random_unitary(dim, rng), random_hermitian(dim, rng));
  const Matrix sym = unitary_symbol(pair);
  for (auto _ : state) benchmark::DoNotOptimize(birkhoff_discrete(pair.main(), sym, n));
}
BENCHMARK(birkhoff_discrete_bench)->Args({16, 64})->Args({64, 64})->Args({64, 1024});

void birkhoff_continuous_bench(benchmark::State& state) {
  const auto dim = static_cast<Eigen::Index>(state.range(0));
  Rng rng(2);
  const OperatorPair pair = OperatorPair::continuous(random_hermitian(dim, rng), random_hermitian(dim, rng));
  const Matrix sym = selfadjoint_symbol(pair);
  for (auto _ : state) benchmark::DoNotOptimize(birkhoff_continuous(pair.main(), sym, 3.0));
}
BENCHMARK(birkhoff_continuous_bench)->Arg(8)->Arg(16)->Arg(32);

void fourier_calculus_bench(benchmark::State& state) {
  Rng rng(3);
  const Matrix u = random_unitary(32, rng);
  const auto n_max = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fourier_calculus(u, [](Complex z) { return arc_bump(z, 0.0, 1.0); }, n_max, 0.5));
  }
}
BENCHMARK(fourier_calculus_bench)->Arg(128)->Arg(512);

void case2_degree_bench(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const double y = (std::sqrt(5.0) - 1.0) / 2.0;
  const TorusFlow flow({y});
  const TrigPolynomial eta(1, {{{1}, Complex(0.0, -0.025)}, {{-1}, Complex(0.0, 0.025)}});
  Rng rng(11);
  Matrix h = random_unitary(2, rng);
  h /= std::sqrt(h.determinant());
  const SU2Cocycle c(h, {1}, eta, n);
  for (auto _ : state) benchmark::DoNotOptimize(case2_degree(c, flow, {128}, 500));
}
BENCHMARK(case2_degree_bench)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
