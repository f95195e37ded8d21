#include <benchmark/benchmark.h>

#include "smoothcert/classifier.hpp"
#include "smoothcert/rng.hpp"
#include "smoothcert/smoothing.hpp"

using namespace smoothcert;

namespace {

TrainingSet synthetic_set(std::size_t n, std::size_t dim) {
    TrainingSet set;
    set.features.rows = n;
    set.features.cols = dim;
    set.features.domain_size = 2;
    set.features.data.resize(n * dim);
    set.labels.resize(n);
    set.num_classes = 2;
    SplitMix64 rng(1);
    for (auto& s : set.features.data) s = static_cast<Symbol>(rng.next_below(2));
    for (std::size_t i = 0; i < n; ++i) set.labels[i] = set.features.data[i * dim];
    return set;
}

} // namespace

// One ensemble member at the full-profile shape (T=100, D=784, H=64, 200
// epochs); classifiers/second on one core is 1 / this time.
static void BM_TrainEnsembleMember(benchmark::State& state) {
    const TrainingSet set = synthetic_set(100, 784);
    const NoiseSpec spec(0.9, 2);
    std::uint32_t index = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_ensemble_member(set, spec, TrainConfig{}, 99, ++index));
    }
}
BENCHMARK(BM_TrainEnsembleMember)->Unit(benchmark::kMillisecond);

static void BM_PredictRows(benchmark::State& state) {
    const TrainingSet set = synthetic_set(100, 784);
    const Classifier clf = train_classifier(set, {64, 5, 0.5}, 3);
    const TrainingSet batch = synthetic_set(1000, 784);
    const Eigen::MatrixXd inputs = fractional_features(batch.features);
    for (auto _ : state) {
        benchmark::DoNotOptimize(predict_rows(clf, inputs));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_PredictRows)->Unit(benchmark::kMillisecond);
