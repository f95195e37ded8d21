#include "smoothcert/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>

#include "binary_io.hpp"
#include "smoothcert/errors.hpp"
#include "smoothcert/rng.hpp"

namespace smoothcert {

namespace {

constexpr char kDatasetMagic[8] = {'S', 'M', 'C', 'D', 'A', 'T', '0', '1'};

void write_symbols_u8(std::ostream& out, const std::vector<Symbol>& symbols) {
    std::vector<std::uint8_t> bytes(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        bytes[i] = static_cast<std::uint8_t>(symbols[i]);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

std::vector<Symbol> read_symbols_u8(std::istream& in, std::size_t n, const char* context) {
    std::vector<std::uint8_t> bytes(n);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(n));
    if (!in) throw FormatError(std::string("truncated file while reading ") + context);
    return {bytes.begin(), bytes.end()};
}

TrainingSet read_split(std::istream& in, std::size_t count, std::size_t dim,
                       std::uint32_t feature_domain, std::uint32_t num_classes,
                       const char* context) {
    TrainingSet set;
    set.features.rows = count;
    set.features.cols = dim;
    set.features.domain_size = feature_domain;
    set.features.data = read_symbols_u8(in, count * dim, context);
    set.labels = read_symbols_u8(in, count, context);
    set.num_classes = num_classes;
    set.validate();
    return set;
}

} // namespace

void TrainingSet::validate() const {
    if (features.rows != labels.size()) {
        throw DimensionError("TrainingSet: feature rows " + std::to_string(features.rows) +
                             " != label count " + std::to_string(labels.size()));
    }
    if (features.data.size() != features.rows * features.cols) {
        throw DimensionError("TrainingSet: feature storage does not match its declared shape");
    }
    if (features.domain_size < 2 || num_classes < 2) {
        throw DomainError("TrainingSet: feature domain and class count must be at least 2");
    }
    for (Symbol s : features.data) {
        if (s >= features.domain_size) {
            throw DomainError("TrainingSet: feature symbol " + std::to_string(s) +
                              " outside domain of size " + std::to_string(features.domain_size));
        }
    }
    for (Symbol y : labels) {
        if (y >= num_classes) {
            throw DomainError("TrainingSet: label " + std::to_string(y) + " outside " +
                              std::to_string(num_classes) + " classes");
        }
    }
}

BinarySplit make_binary_subset(const RawDataset& raw, std::pair<std::uint8_t, std::uint8_t> digits,
                               std::size_t n_train, std::size_t n_test, std::uint64_t seed) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < raw.count(); ++i) {
        if (raw.labels[i] == digits.first || raw.labels[i] == digits.second) {
            candidates.push_back(i);
        }
    }
    if (candidates.size() < n_train + n_test) {
        throw DataError("make_binary_subset: need " + std::to_string(n_train + n_test) +
                        " examples of digits " + std::to_string(digits.first) + "/" +
                        std::to_string(digits.second) + ", found " +
                        std::to_string(candidates.size()));
    }

    // Fisher-Yates with the split stream; the first n_train + n_test shuffled
    // indices form the two disjoint subsets.
    SplitMix64 rng(derive_seed(seed, SeedStream::dataset_split));
    for (std::size_t i = 0; i + 1 < candidates.size(); ++i) {
        const std::size_t j = i + rng.next_below(candidates.size() - i);
        std::swap(candidates[i], candidates[j]);
    }

    const std::size_t dim = static_cast<std::size_t>(raw.rows) * raw.cols;
    auto fill = [&](TrainingSet& set, std::size_t offset, std::size_t count) {
        set.features.rows = count;
        set.features.cols = dim;
        set.features.domain_size = 2;
        set.features.data.resize(count * dim);
        set.labels.resize(count);
        set.num_classes = 2;
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t src = candidates[offset + k];
            const std::uint8_t* pixels = raw.image(src);
            Symbol* dst = set.features.data.data() + k * dim;
            for (std::size_t p = 0; p < dim; ++p) {
                dst[p] = pixels[p] < 128 ? 0 : 1; // threshold at half intensity
            }
            set.labels[k] = raw.labels[src] == digits.first ? 0 : 1;
        }
    };

    BinarySplit split;
    fill(split.train, 0, n_train);
    fill(split.test, n_train, n_test);
    return split;
}

void save_dataset(const std::filesystem::path& path, const BinarySplit& split) {
    split.train.validate();
    split.test.validate();
    if (split.train.feature_domain() > 256 || split.train.num_classes > 256) {
        throw FormatError("save_dataset: container stores symbols as single bytes; "
                          "domains above 256 are not representable");
    }
    if (split.train.feature_domain() != split.test.feature_domain() ||
        split.train.features.cols != split.test.features.cols ||
        split.train.num_classes != split.test.num_classes) {
        throw DimensionError("save_dataset: train and test splits disagree on shape");
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open for writing: " + path.string());
    out.write(kDatasetMagic, sizeof(kDatasetMagic));
    detail::put_u32(out, split.train.feature_domain());
    detail::put_u32(out, split.train.num_classes);
    detail::put_u32(out, static_cast<std::uint32_t>(split.train.features.cols));
    detail::put_u32(out, static_cast<std::uint32_t>(split.train.size()));
    detail::put_u32(out, static_cast<std::uint32_t>(split.test.size()));
    write_symbols_u8(out, split.train.features.data);
    write_symbols_u8(out, split.train.labels);
    write_symbols_u8(out, split.test.features.data);
    write_symbols_u8(out, split.test.labels);
    if (!out) throw FormatError("write failed: " + path.string());
}

BinarySplit load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open dataset file: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kDatasetMagic, sizeof(magic)) != 0) {
        throw FormatError(path.string() + ": not a smoothcert dataset file (bad magic, expected " +
                          std::string(kDatasetMagic, sizeof(kDatasetMagic)) + ")");
    }
    const std::uint32_t d = detail::get_u32(in, "feature domain");
    const std::uint32_t c = detail::get_u32(in, "class count");
    const std::uint32_t dim = detail::get_u32(in, "feature count");
    const std::uint32_t n_train = detail::get_u32(in, "train size");
    const std::uint32_t n_test = detail::get_u32(in, "test size");

    BinarySplit split;
    split.train = read_split(in, n_train, dim, d, c, "train split");
    split.test = read_split(in, n_test, dim, d, c, "test split");
    return split;
}

} // namespace smoothcert
