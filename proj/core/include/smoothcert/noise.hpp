#pragma once

#include <cstdint>
#include <vector>

#include "smoothcert/rng.hpp"

namespace smoothcert {

using Symbol = std::uint32_t;

// Parameters of the discrete smoothing channel over a size-d symbol domain:
// a coordinate keeps its value with probability beta and moves to each of
// the d-1 other symbols with probability theta = (1-beta)/(d-1).
struct NoiseSpec {
    double beta;
    std::uint32_t domain_size;
    double theta; // always (1-beta)/(domain_size-1), set by the constructor

    NoiseSpec(double beta, std::uint32_t domain_size);

    // beta/theta, the per-coordinate likelihood ratio. > 1 by construction.
    double ratio() const noexcept { return beta / theta; }
};

// A vector over the integer symbol domain {0, ..., domain_size-1}. Fractional
// values k/d exist only at the classifier-input boundary; everything else in
// the library works on these exact integer symbols.
struct EncodedVector {
    std::vector<Symbol> symbols;
    std::uint32_t domain_size = 2;

    std::size_t size() const noexcept { return symbols.size(); }

    static EncodedVector validated(std::vector<Symbol> symbols, std::uint32_t domain_size);
};

// Per-coordinate modular addition in the symbol domain.
EncodedVector modular_add(const EncodedVector& v, const EncodedVector& delta);

// The additive inverse under modular_add: delta_j -> (d - delta_j) mod d.
EncodedVector modular_negate(const EncodedVector& delta);

// One channel draw. Used by sample_noise and by the hot pipeline loops.
inline Symbol sample_symbol(SplitMix64& rng, const NoiseSpec& spec) noexcept {
    const double u = rng.next_double();
    if (u < spec.beta) {
        return 0;
    }
    const auto shifted = static_cast<std::uint32_t>((u - spec.beta) / spec.theta);
    const std::uint32_t cap = spec.domain_size - 2;
    return 1 + (shifted < cap ? shifted : cap);
}

// Length-`length` i.i.d. noise vector. Deterministic given (spec, length, seed).
EncodedVector sample_noise(const NoiseSpec& spec, std::size_t length, std::uint64_t seed);

// v perturbed by a fresh noise vector: modular_add(v, sample_noise(...)).
EncodedVector apply_noise(const EncodedVector& v, const NoiseSpec& spec, std::uint64_t seed);

} // namespace smoothcert
