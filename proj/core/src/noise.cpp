#include "smoothcert/noise.hpp"

#include <cmath>
#include <sstream>

#include "smoothcert/errors.hpp"

namespace smoothcert {

NoiseSpec::NoiseSpec(double beta, std::uint32_t domain_size)
    : beta(beta), domain_size(domain_size) {
    if (domain_size < 2) {
        throw DomainError("NoiseSpec: domain_size must be at least 2, got " +
                          std::to_string(domain_size));
    }
    if (!(beta > 1.0 / domain_size) || !(beta < 1.0)) {
        std::ostringstream msg;
        msg << "NoiseSpec: beta must satisfy 1/d < beta < 1 (strict), got beta=" << beta
            << " with d=" << domain_size;
        throw DomainError(msg.str());
    }
    theta = (1.0 - beta) / (domain_size - 1);
}

EncodedVector EncodedVector::validated(std::vector<Symbol> symbols, std::uint32_t domain_size) {
    if (domain_size < 2) {
        throw DomainError("EncodedVector: domain_size must be at least 2");
    }
    for (std::size_t j = 0; j < symbols.size(); ++j) {
        if (symbols[j] >= domain_size) {
            throw DomainError("EncodedVector: symbol " + std::to_string(symbols[j]) +
                              " at position " + std::to_string(j) + " is outside domain of size " +
                              std::to_string(domain_size));
        }
    }
    return EncodedVector{std::move(symbols), domain_size};
}

EncodedVector modular_add(const EncodedVector& v, const EncodedVector& delta) {
    if (v.size() != delta.size()) {
        throw DimensionError("modular_add: length mismatch (" + std::to_string(v.size()) +
                             " vs " + std::to_string(delta.size()) + ")");
    }
    if (v.domain_size != delta.domain_size) {
        throw DomainError("modular_add: domain_size mismatch (" + std::to_string(v.domain_size) +
                          " vs " + std::to_string(delta.domain_size) + ")");
    }
    EncodedVector out;
    out.domain_size = v.domain_size;
    out.symbols.resize(v.size());
    const std::uint32_t d = v.domain_size;
    for (std::size_t j = 0; j < v.size(); ++j) {
        out.symbols[j] = (v.symbols[j] + delta.symbols[j]) % d;
    }
    return out;
}

EncodedVector modular_negate(const EncodedVector& delta) {
    EncodedVector out;
    out.domain_size = delta.domain_size;
    out.symbols.resize(delta.size());
    const std::uint32_t d = delta.domain_size;
    for (std::size_t j = 0; j < delta.size(); ++j) {
        out.symbols[j] = (d - delta.symbols[j]) % d;
    }
    return out;
}

EncodedVector sample_noise(const NoiseSpec& spec, std::size_t length, std::uint64_t seed) {
    EncodedVector out;
    out.domain_size = spec.domain_size;
    out.symbols.resize(length);
    SplitMix64 rng(seed);
    for (std::size_t j = 0; j < length; ++j) {
        out.symbols[j] = sample_symbol(rng, spec);
    }
    return out;
}

EncodedVector apply_noise(const EncodedVector& v, const NoiseSpec& spec, std::uint64_t seed) {
    if (v.domain_size != spec.domain_size) {
        throw DomainError("apply_noise: vector domain_size " + std::to_string(v.domain_size) +
                          " does not match noise domain_size " + std::to_string(spec.domain_size));
    }
    return modular_add(v, sample_noise(spec, v.size(), seed));
}

} // namespace smoothcert
