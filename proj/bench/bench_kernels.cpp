// OpenMP kernels against their serial references at solver-sized inputs.
// On a single-core machine the two columns should match; the parallel
// versions pay off once OMP_NUM_THREADS > 1.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>
#include <random>
#include <vector>

#include "nlcs/kernels.hpp"

using namespace nlcs;

namespace {

std::vector<cplx> random_field(std::size_t n) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d;
  std::vector<cplx> f(n);
  for (auto& v : f) v = {d(rng), d(rng)};
  return f;
}

std::vector<double> random_real(std::size_t n) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> f(n);
  for (auto& v : f) v = d(rng);
  return f;
}

template <bool Parallel>
void rotate_phase(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto field = random_field(n);
  const auto potential = random_real(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::rotate_phase(field, potential, 1e-3);
    else
      kernels::reference::rotate_phase(field, potential, 1e-3);
    benchmark::DoNotOptimize(field.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void density_power(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto field = random_field(n);
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::density_power(field, 2, 0.5, out);
    else
      kernels::reference::density_power(field, 2, 0.5, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void toeplitz_convolution(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto density = random_real(n);
  auto weights = random_real(n);
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::toeplitz_convolution(density, weights, out);
    else
      kernels::reference::toeplitz_convolution(density, weights, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}

template <bool Parallel>
void trig_interpolate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto grid = PeriodicGrid::centered(40.0, n);
  const auto coefficients = random_field(n);
  std::vector<double> points(4 * n);
  for (std::size_t i = 0; i < points.size(); ++i) points[i] = -15.0 + 30.0 * i / points.size();
  std::vector<cplx> out(points.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::trig_interpolate(coefficients, grid, points, out);
    else
      kernels::reference::trig_interpolate(coefficients, grid, points, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(rotate_phase<false>)->Name("rotate_phase/serial")->RangeMultiplier(4)->Range(1 << 12, 1 << 16);
BENCHMARK(rotate_phase<true>)->Name("rotate_phase/openmp")->RangeMultiplier(4)->Range(1 << 12, 1 << 16);
BENCHMARK(density_power<false>)->Name("density_power/serial")->RangeMultiplier(4)->Range(1 << 12, 1 << 16);
BENCHMARK(density_power<true>)->Name("density_power/openmp")->RangeMultiplier(4)->Range(1 << 12, 1 << 16);
BENCHMARK(toeplitz_convolution<false>)->Name("toeplitz/serial")->RangeMultiplier(2)->Range(256, 2048);
BENCHMARK(toeplitz_convolution<true>)->Name("toeplitz/openmp")->RangeMultiplier(2)->Range(256, 2048);
BENCHMARK(trig_interpolate<false>)->Name("trig_interpolate/serial")->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(trig_interpolate<true>)->Name("trig_interpolate/openmp")->RangeMultiplier(2)->Range(64, 512);

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  benchmark::AddCustomContext("omp_max_threads", std::to_string(omp_get_max_threads()));
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
