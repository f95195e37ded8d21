#include "smoothcert/attack.hpp"

#include <algorithm>
#include <string>

#include "smoothcert/errors.hpp"
#include "smoothcert/rng.hpp"

namespace smoothcert {

namespace {

void validate_pattern(const TriggerSpec& trig, std::size_t dim, std::uint32_t domain) {
    if (trig.pixel_positions.size() != trig.pixel_values.size()) {
        throw DimensionError("TriggerSpec: positions and values differ in length");
    }
    for (std::uint32_t pos : trig.pixel_positions) {
        if (pos >= dim) {
            throw DomainError("TriggerSpec: position " + std::to_string(pos) +
                              " outside feature dimension " + std::to_string(dim));
        }
    }
    std::vector<std::uint32_t> sorted = trig.pixel_positions;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        // duplicate writes would make the reported perturbation size diverge
        // from the true Hamming distance
        throw DomainError("TriggerSpec: duplicate trigger position");
    }
    for (Symbol v : trig.pixel_values) {
        if (v >= domain) {
            throw DomainError("TriggerSpec: trigger value " + std::to_string(v) +
                              " outside feature domain " + std::to_string(domain));
        }
    }
}

void validate_trigger(const TriggerSpec& trig, std::size_t dim, std::uint32_t domain,
                      std::uint32_t num_classes) {
    validate_pattern(trig, dim, domain);
    if (trig.target_label >= num_classes) {
        throw DomainError("TriggerSpec: target label " + std::to_string(trig.target_label) +
                          " outside " + std::to_string(num_classes) + " classes");
    }
}

} // namespace

PoisonResult poison_training_set(const TrainingSet& train, const TriggerSpec& trig,
                                 std::uint64_t seed) {
    validate_trigger(trig, train.features.cols, train.feature_domain(), train.num_classes);
    if (trig.poison_count > train.size()) {
        throw DataError("poison_training_set: poison_count " + std::to_string(trig.poison_count) +
                        " exceeds training size " + std::to_string(train.size()));
    }

    PoisonResult result;
    result.poisoned = train;

    // Choose poison_count distinct victims via a partial Fisher-Yates shuffle.
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    SplitMix64 rng(derive_seed(seed, SeedStream::poison_selection));
    for (std::uint32_t i = 0; i < trig.poison_count; ++i) {
        const std::size_t j = i + rng.next_below(order.size() - i);
        std::swap(order[i], order[j]);
    }
    result.poisoned_indices.assign(order.begin(), order.begin() + trig.poison_count);
    std::sort(result.poisoned_indices.begin(), result.poisoned_indices.end());

    for (std::size_t row : result.poisoned_indices) {
        auto features = result.poisoned.features.row(row);
        for (std::size_t k = 0; k < trig.pixel_positions.size(); ++k) {
            Symbol& cell = features[trig.pixel_positions[k]];
            if (cell != trig.pixel_values[k]) {
                cell = trig.pixel_values[k];
                ++result.features_changed;
            }
        }
        Symbol& label = result.poisoned.labels[row];
        if (label != trig.target_label) {
            label = trig.target_label;
            ++result.labels_changed;
        }
    }
    return result;
}

TriggerResult apply_trigger(const EncodedVector& x, const TriggerSpec& trig) {
    validate_pattern(trig, x.size(), x.domain_size);
    TriggerResult result{x, 0};
    for (std::size_t k = 0; k < trig.pixel_positions.size(); ++k) {
        const std::uint32_t pos = trig.pixel_positions[k];
        if (result.triggered.symbols[pos] != trig.pixel_values[k]) {
            result.triggered.symbols[pos] = trig.pixel_values[k];
            ++result.symbols_changed;
        }
    }
    return result;
}

} // namespace smoothcert
