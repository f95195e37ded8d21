#include <benchmark/benchmark.h>

#include "smoothcert/radius.hpp"

using namespace smoothcert;

static void BM_RegionMasses(benchmark::State& state) {
    const NoiseSpec spec(0.9, 2);
    const auto r = static_cast<std::uint32_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(region_masses(spec, r));
    }
}
BENCHMARK(BM_RegionMasses)->Arg(1)->Arg(4)->Arg(16)->Arg(64)->Arg(256);

static void BM_MinAdversarialProb(benchmark::State& state) {
    const NoiseSpec spec(0.9, 5);
    const RegionTable table = region_masses(spec, static_cast<std::uint32_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(min_adversarial_prob(0.97, table));
    }
}
BENCHMARK(BM_MinAdversarialProb)->Arg(2)->Arg(8)->Arg(32);

static void BM_CertifiedRadius(benchmark::State& state) {
    const NoiseSpec spec(0.9, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(certified_radius(0.9986, spec));
    }
}
BENCHMARK(BM_CertifiedRadius);
