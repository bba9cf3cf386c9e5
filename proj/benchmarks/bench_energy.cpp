#include <benchmark/benchmark.h>

#include "ninput/energy.hpp"
#include "ninput/kernels.hpp"
#include "ninput/optimize.hpp"

namespace {

using namespace ninput;

void BM_DiscreteEnergyArea2(benchmark::State& state) {
  const KernelSpec k = make_kernel("area2");
  const PointConfiguration c = sample_sphere(3, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(discrete_energy(k, c).value);
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * state.range(0));
}
BENCHMARK(BM_DiscreteEnergyArea2)->Arg(16)->Arg(32)->Arg(64);

void BM_MonteCarloArea2(benchmark::State& state) {
  const KernelSpec k = make_kernel("area2");
  for (auto _ : state) benchmark::DoNotOptimize(mc_energy_uniform(k, 3, state.range(0), 7).value);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloArea2)->Arg(100000);

void BM_GradientsArea2(benchmark::State& state) {
  const KernelSpec k = make_kernel("area2");
  const PointConfiguration c = sample_sphere(3, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(energy_gradients(k, c));
}
BENCHMARK(BM_GradientsArea2)->Arg(10)->Arg(30);

void BM_MixturePolynomial(benchmark::State& state) {
  const KernelSpec k = make_kernel("s100");
  const DiscreteMeasure mu = DiscreteMeasure::empirical(sample_sphere(3, static_cast<std::size_t>(state.range(0)), 3));
  const DiscreteMeasure nu = DiscreteMeasure::empirical(sample_sphere(3, 8, 4));
  for (auto _ : state) benchmark::DoNotOptimize(mixture_polynomial(k, mu, nu).coefficients());
}
BENCHMARK(BM_MixturePolynomial)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
