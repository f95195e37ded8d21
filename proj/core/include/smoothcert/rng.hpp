#pragma once

#include <cstdint>

namespace smoothcert {

// 64-bit finalizer used by SplitMix64. Stateless, bijective.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based generator: the n-th output is a pure function of (seed, n),
// so identical seeds give identical streams regardless of platform, thread
// or call order. This is the SplitMix64 generator of Steele, Lea and Flood.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform double in [0, 1) with 53 random bits.
    constexpr double next_double() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound). Unbiased (Lemire's method with rejection).
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t state_;
};

// Independent randomness streams. Every random decision in the library draws
// from a seed derived as (master seed, stream tag, indices), never from
// shared mutable generator state, so results are independent of scheduling.
enum class SeedStream : std::uint64_t {
    dataset_split = 1,
    train_features = 2,
    train_labels = 3,
    classifier_init = 4,
    test_noise = 5,
    poison_selection = 6,
    attack_retrain = 7,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                                    std::uint64_t index = 0,
                                    std::uint64_t sub_index = 0) noexcept {
    std::uint64_t h = mix64(master ^ 0x6a09e667f3bcc908ULL);
    h = mix64(h ^ static_cast<std::uint64_t>(stream));
    h = mix64(h ^ index);
    h = mix64(h ^ sub_index);
    return h;
}

} // namespace smoothcert
