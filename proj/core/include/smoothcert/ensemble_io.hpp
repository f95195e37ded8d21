#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>

#include "smoothcert/classifier.hpp"
#include "smoothcert/dataset.hpp"

namespace smoothcert {

// On-disk ensemble container: a fixed-size header followed by each
// classifier's weights as little-endian 64-bit floats in declared order
// (w1 row-major, b1, w2 row-major, b2). Fixed-size blocks make the layout
// position-addressable, so training workers can write finished classifiers
// at their slot from any thread and readers can stream or seek.
struct EnsembleHeader {
    std::uint32_t version = 1;
    std::uint32_t n_classifiers = 0;
    double beta = 0.0;
    std::uint32_t domain_size = 0;
    std::uint32_t num_classes = 0;
    std::uint32_t input_dim = 0;
    std::uint32_t hidden_units = 0;
    std::uint32_t epochs = 0;
    double learning_rate = 0.0;
    std::uint64_t master_seed = 0;
    std::uint64_t training_fingerprint = 0;

    std::size_t classifier_block_size() const noexcept;
    std::size_t file_size() const noexcept;
};

// Hash of the training data and every hyperparameter that shapes the
// ensemble; certify refuses to run against a dataset it was not built from.
std::uint64_t training_fingerprint(const TrainingSet& train, const TrainConfig& cfg,
                                   const NoiseSpec& spec);

// Writes classifiers into a preallocated temporary file at their block
// offset (safe to call from multiple threads with distinct indices), then
// commits with an atomic rename so an interrupted run leaves no valid file.
class EnsembleWriter {
public:
    EnsembleWriter(std::filesystem::path destination, const EnsembleHeader& header);
    ~EnsembleWriter();
    EnsembleWriter(const EnsembleWriter&) = delete;
    EnsembleWriter& operator=(const EnsembleWriter&) = delete;

    void write_classifier(std::uint32_t index, const Classifier& clf);
    void commit();

private:
    std::filesystem::path destination_;
    std::filesystem::path temp_path_;
    EnsembleHeader header_;
    int fd_ = -1;
};

class EnsembleReader {
public:
    explicit EnsembleReader(const std::filesystem::path& path);
    ~EnsembleReader();
    EnsembleReader(const EnsembleReader&) = delete;
    EnsembleReader& operator=(const EnsembleReader&) = delete;

    const EnsembleHeader& header() const noexcept { return header_; }

    // Random access by classifier index; safe to call from multiple threads.
    Classifier read_classifier(std::uint32_t index) const;

private:
    std::filesystem::path path_;
    EnsembleHeader header_;
    int fd_ = -1;
};

} // namespace smoothcert
