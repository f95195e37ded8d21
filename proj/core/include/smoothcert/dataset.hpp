#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "smoothcert/mnist.hpp"
#include "smoothcert/noise.hpp"

namespace smoothcert {

// Row-major matrix of integer symbols sharing one domain size.
struct SymbolMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::uint32_t domain_size = 2;
    std::vector<Symbol> data; // rows * cols

    std::span<const Symbol> row(std::size_t i) const noexcept {
        return {data.data() + i * cols, cols};
    }
    std::span<Symbol> row(std::size_t i) noexcept { return {data.data() + i * cols, cols}; }

    EncodedVector row_vector(std::size_t i) const {
        return EncodedVector{{row(i).begin(), row(i).end()}, domain_size};
    }
};

// A labelled set of encoded examples: T x D feature symbols over domain d,
// T labels over {0, ..., c-1}.
struct TrainingSet {
    SymbolMatrix features;
    std::vector<Symbol> labels;
    std::uint32_t num_classes = 2;

    std::size_t size() const noexcept { return labels.size(); }
    std::uint32_t feature_domain() const noexcept { return features.domain_size; }

    void validate() const; // throws on any violated field invariant
};

struct BinarySplit {
    TrainingSet train;
    TrainingSet test;
};

// Filters a raw dataset down to two digits, relabels them 0/1 (first digit of
// the pair -> 0), binarizes pixels at half intensity (byte < 128 -> 0, else
// 1) and draws disjoint train/test subsets uniformly via the seed.
BinarySplit make_binary_subset(const RawDataset& raw, std::pair<std::uint8_t, std::uint8_t> digits,
                               std::size_t n_train, std::size_t n_test, std::uint64_t seed);

// Prepared-dataset container (see README for the byte layout). Symbols are
// stored as single bytes, so feature domains above 256 are rejected.
void save_dataset(const std::filesystem::path& path, const BinarySplit& split);
BinarySplit load_dataset(const std::filesystem::path& path);

} // namespace smoothcert
