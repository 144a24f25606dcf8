// Serial reference against the OpenMP kernels. Set OMP_NUM_THREADS to vary
// the parallel side; the reference ignores it.
#include <benchmark/benchmark.h>

#include <vector>

#include "stablebip/posterior_core.hpp"
#include "stablebip/series_prior.hpp"
#include "stablebip/stable_dist.hpp"
#include "test_support.hpp"

namespace {

using namespace stablebip;

const StableParams kLaw{1.5, 0.5, 1.0, 0.0};

void BM_SampleStable_Serial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reference::sample_stable(kLaw, 1, n));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SampleStable_Parallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_stable(kLaw, 1, n));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FractionalMoment_Serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::fractional_moment_estimate(kLaw, 0.9, 2, 1 << 20));
}

void BM_FractionalMoment_Parallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fractional_moment_estimate(kLaw, 0.9, 2, 1 << 20));
}

ExpansionSpec bench_prior() { return testing::cauchy_prior(128, BasisFamily::kHaar, 0.5); }

void BM_PriorDraws_Serial(benchmark::State& state) {
  const auto spec = bench_prior();
  for (auto _ : state) benchmark::DoNotOptimize(reference::draw_prior_batch(spec, 3, 10000));
}

void BM_PriorDraws_Parallel(benchmark::State& state) {
  const auto spec = bench_prior();
  for (auto _ : state) benchmark::DoNotOptimize(draw_prior_batch(spec, 3, 10000));
}

struct PotentialFixture {
  PriorDraws draws = draw_prior_batch(bench_prior(), 4, 20000);
  Potential phi = gaussian_potential({Eigen::MatrixXd::Constant(16, 128, 1.0 / 128.0), ""},
                                     NoiseModel::isotropic(16, 0.01));
  std::vector<double> y = std::vector<double>(16, 0.1);
};

void BM_Potential_Serial(benchmark::State& state) {
  static const PotentialFixture f;
  for (auto _ : state) benchmark::DoNotOptimize(reference::evaluate_potential(f.draws, f.phi, f.y));
}

void BM_Potential_Parallel(benchmark::State& state) {
  static const PotentialFixture f;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_potential(f.draws, f.phi, f.y));
}

BENCHMARK(BM_SampleStable_Serial)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleStable_Parallel)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FractionalMoment_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FractionalMoment_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PriorDraws_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PriorDraws_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Potential_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Potential_Parallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
