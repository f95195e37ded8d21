#pragma once

#include <cstdint>
#include <vector>

#include "smoothcert/dataset.hpp"
#include "smoothcert/noise.hpp"

namespace smoothcert {

// A concrete backdoor: overwrite the given feature positions with fixed
// symbols in poison_count training examples (relabelling them to the target),
// then stamp the same pattern on test inputs.
struct TriggerSpec {
    std::vector<std::uint32_t> pixel_positions;
    std::vector<Symbol> pixel_values; // one per position
    std::uint32_t target_label = 0;
    std::uint32_t poison_count = 0;
};

// Perturbation sizes are counted post hoc: a write that leaves a symbol
// unchanged costs nothing, exactly like the Hamming distance it is compared
// against.
struct PoisonResult {
    TrainingSet poisoned;
    std::uint64_t features_changed = 0;       // feature symbols actually flipped
    std::uint64_t labels_changed = 0;         // labels actually flipped
    std::vector<std::size_t> poisoned_indices; // which examples were poisoned
};

PoisonResult poison_training_set(const TrainingSet& train, const TriggerSpec& trig,
                                 std::uint64_t seed);

struct TriggerResult {
    EncodedVector triggered;
    std::uint64_t symbols_changed = 0;
};

TriggerResult apply_trigger(const EncodedVector& x, const TriggerSpec& trig);

} // namespace smoothcert
