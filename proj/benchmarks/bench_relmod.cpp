#include <random>

#include <benchmark/benchmark.h>

#include "relmod/int_linalg.hpp"
#include "relmod/mle.hpp"
#include "relmod/spec_io.hpp"
#include "relmod/stats.hpp"

using namespace relmod;

namespace {

IntegerMatrix random_matrix(std::size_t r, std::size_t c, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> e(0, 6);
  IntegerMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = e(rng);
  return m;
}

void BM_HermiteNormalForm(benchmark::State& state) {
  const auto a = random_matrix(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(hermite_normal_form(a));
}
BENCHMARK(BM_HermiteNormalForm)->Args({4, 8})->Args({8, 12})->Args({12, 24});

void BM_CanonicalKernel(benchmark::State& state) {
  const auto a = random_matrix(8, 12, 2);
  for (auto _ : state) benchmark::DoNotOptimize(canonical_integer_basis(integer_kernel_basis(a).D));
}
BENCHMARK(BM_CanonicalKernel);

void BM_FitDataset(benchmark::State& state, const char* file) {
  const auto spec = load_model_spec(std::string(RELMOD_DATA_DIR) + "/" + file);
  const auto model = build_model(spec);
  const auto obs = spec_observations(spec, model.table());
  for (auto _ : state) benchmark::DoNotOptimize(fit(model, obs));
}
BENCHMARK_CAPTURE(BM_FitDataset, crab, "crab_charybdis.yaml");
BENCHMARK_CAPTURE(BM_FitDataset, calves_curved, "calves.yaml");
BENCHMARK_CAPTURE(BM_FitDataset, mobility, "mobility.yaml");
BENCHMARK_CAPTURE(BM_FitDataset, trade, "trade.yaml");

void BM_ChiSquareSf(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(chi_square_sf(20.16, 14));
}
BENCHMARK(BM_ChiSquareSf);

}  // namespace

BENCHMARK_MAIN();
