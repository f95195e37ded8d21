#include <benchmark/benchmark.h>

#include "smoothcert/estimation.hpp"

using namespace smoothcert;

static void BM_ClopperPearson(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    const std::uint32_t k = n - n / 100;
    for (auto _ : state) {
        benchmark::DoNotOptimize(clopper_pearson_lower(k, n, 1e-6));
    }
}
BENCHMARK(BM_ClopperPearson)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_IncompleteBeta(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(regularized_incomplete_beta(9976.0, 25.0, 0.9975));
    }
}
BENCHMARK(BM_IncompleteBeta);
