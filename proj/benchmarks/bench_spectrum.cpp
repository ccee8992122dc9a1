#include <benchmark/benchmark.h>

#include <vector>

#include "coalesce/closed_form.hpp"
#include "coalesce/experiments.hpp"
#include "coalesce/spectrum.hpp"
#include "coalesce/transfer_matrix.hpp"

using namespace coalesce;

namespace {

CavitySystem reference_cavity(double zeta_m = -196.6) {
  return CavitySystem::membrane_in_middle(Polarizability(-10.0), Polarizability(zeta_m), 0.0);
}

}  // namespace

static void BM_Transmission(benchmark::State& state) {
  const auto sys = reference_cavity();
  double k = 6.17;
  for (auto _ : state) {
    benchmark::DoNotOptimize(transmission(sys, k));
    k += 1e-9;
  }
}
BENCHMARK(BM_Transmission);

static void BM_TransmissionSlope(benchmark::State& state) {
  const auto sys = reference_cavity();
  for (auto _ : state) benchmark::DoNotOptimize(transmission_slope(sys, 6.178));
}
BENCHMARK(BM_TransmissionSlope);

static void BM_StackMatrix(benchmark::State& state) {
  const auto stack = uniform_stack(Polarizability(1.0), static_cast<int>(state.range(0)), 0.875);
  for (auto _ : state) benchmark::DoNotOptimize(stack_matrix(stack, 6.283));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StackMatrix)->RangeMultiplier(2)->Range(1, 64)->Complexity();

static void BM_ScanTransmission(benchmark::State& state) {
  const auto sys = reference_cavity(-50.0);
  const Parallelism par{static_cast<unsigned>(state.range(1))};
  for (auto _ : state) {
    auto samples = scan_transmission(sys, 5.8, 6.4, static_cast<std::size_t>(state.range(0)), par);
    benchmark::DoNotOptimize(samples.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScanTransmission)->Args({2001, 1})->Args({200001, 1})->Args({200001, 4});

static void BM_FindPeaks(benchmark::State& state) {
  const auto sys = reference_cavity();
  for (auto _ : state) {
    auto peaks = find_peaks(sys, 6.1, 6.25);
    benchmark::DoNotOptimize(peaks.data());
  }
}
BENCHMARK(BM_FindPeaks);

static void BM_TrackBranches(benchmark::State& state) {
  const auto xs = linspace(-0.002, 0.002, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto b = track_branches(Polarizability(-10.0), Polarizability(-196.6), xs, {6.1, 6.25});
    benchmark::DoNotOptimize(b.data());
  }
}
BENCHMARK(BM_TrackBranches)->Arg(21)->Arg(201)->Unit(benchmark::kMillisecond);

static void BM_FindMergePoint(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_merge_point(Polarizability(-10.0), {-150.0, -250.0}));
  }
}
BENCHMARK(BM_FindMergePoint)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
