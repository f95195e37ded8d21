#include <benchmark/benchmark.h>

#include "smoothcert/noise.hpp"

using namespace smoothcert;

static void BM_SampleNoise(benchmark::State& state) {
    const NoiseSpec spec(0.9, 2);
    const auto length = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_noise(spec, length, ++seed));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(length));
}
BENCHMARK(BM_SampleNoise)->Arg(784)->Arg(78400);

static void BM_ApplyNoise(benchmark::State& state) {
    const NoiseSpec spec(0.9, 2);
    EncodedVector v{std::vector<Symbol>(784, 1), 2};
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_noise(v, spec, ++seed));
    }
    state.SetItemsProcessed(state.iterations() * 784);
}
BENCHMARK(BM_ApplyNoise);
