#include "smoothcert/ensemble_io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "binary_io.hpp"
#include "smoothcert/errors.hpp"
#include "smoothcert/hashing.hpp"

namespace smoothcert {

namespace {

constexpr char kEnsembleMagic[8] = {'S', 'M', 'C', 'E', 'N', 'S', '0', '1'};
constexpr std::size_t kHeaderSize = 8 + 4 + 4 + 8 + 4 + 4 + 4 + 4 + 4 + 8 + 8 + 8;

void append_f64_le(std::vector<unsigned char>& buf, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

double read_f64_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t{p[i]} << (8 * i);
    return std::bit_cast<double>(bits);
}

[[noreturn]] void throw_errno(const std::string& what, const std::filesystem::path& path) {
    throw FormatError(what + " " + path.string() + ": " + std::strerror(errno));
}

} // namespace

std::size_t EnsembleHeader::classifier_block_size() const noexcept {
    const std::size_t weights = static_cast<std::size_t>(hidden_units) * input_dim + hidden_units +
                                static_cast<std::size_t>(num_classes) * hidden_units + num_classes;
    return weights * sizeof(double);
}

std::size_t EnsembleHeader::file_size() const noexcept {
    return kHeaderSize + static_cast<std::size_t>(n_classifiers) * classifier_block_size();
}

std::uint64_t training_fingerprint(const TrainingSet& train, const TrainConfig& cfg,
                                   const NoiseSpec& spec) {
    StreamHash h;
    h.update_u64(train.features.rows);
    h.update_u64(train.features.cols);
    h.update_u32(train.feature_domain());
    h.update_u32(train.num_classes);
    for (Symbol s : train.features.data) h.update_u32(s);
    for (Symbol y : train.labels) h.update_u32(y);
    h.update_u32(cfg.hidden_units);
    h.update_u32(cfg.epochs);
    h.update_f64(cfg.learning_rate);
    h.update_f64(spec.beta);
    h.update_u32(spec.domain_size);
    return h.digest();
}

EnsembleWriter::EnsembleWriter(std::filesystem::path destination, const EnsembleHeader& header)
    : destination_(std::move(destination)), header_(header) {
    temp_path_ = destination_;
    temp_path_ += ".tmp";
    fd_ = ::open(temp_path_.c_str(), O_CREAT | O_TRUNC | O_RDWR, 0644);
    if (fd_ < 0) throw_errno("cannot create", temp_path_);
    if (::ftruncate(fd_, static_cast<off_t>(header_.file_size())) != 0) {
        throw_errno("cannot preallocate", temp_path_);
    }

    std::ostringstream head;
    head.write(kEnsembleMagic, sizeof(kEnsembleMagic));
    detail::put_u32(head, header_.version);
    detail::put_u32(head, header_.n_classifiers);
    detail::put_f64(head, header_.beta);
    detail::put_u32(head, header_.domain_size);
    detail::put_u32(head, header_.num_classes);
    detail::put_u32(head, header_.input_dim);
    detail::put_u32(head, header_.hidden_units);
    detail::put_u32(head, header_.epochs);
    detail::put_f64(head, header_.learning_rate);
    detail::put_u64(head, header_.master_seed);
    detail::put_u64(head, header_.training_fingerprint);
    const std::string bytes = head.str();
    if (::pwrite(fd_, bytes.data(), bytes.size(), 0) != static_cast<ssize_t>(bytes.size())) {
        throw_errno("cannot write header to", temp_path_);
    }
}

EnsembleWriter::~EnsembleWriter() {
    if (fd_ >= 0) {
        ::close(fd_);
        std::error_code ec;
        std::filesystem::remove(temp_path_, ec); // uncommitted runs leave nothing behind
    }
}

void EnsembleWriter::write_classifier(std::uint32_t index, const Classifier& clf) {
    if (index >= header_.n_classifiers) {
        throw DimensionError("EnsembleWriter: classifier index out of range");
    }
    if (clf.w1.rows() != header_.hidden_units || clf.w1.cols() != header_.input_dim ||
        clf.w2.rows() != header_.num_classes) {
        throw DimensionError("EnsembleWriter: classifier shape does not match the header");
    }
    std::vector<unsigned char> block;
    block.reserve(header_.classifier_block_size());
    for (Eigen::Index r = 0; r < clf.w1.rows(); ++r) {
        for (Eigen::Index c = 0; c < clf.w1.cols(); ++c) append_f64_le(block, clf.w1(r, c));
    }
    for (Eigen::Index i = 0; i < clf.b1.size(); ++i) append_f64_le(block, clf.b1(i));
    for (Eigen::Index r = 0; r < clf.w2.rows(); ++r) {
        for (Eigen::Index c = 0; c < clf.w2.cols(); ++c) append_f64_le(block, clf.w2(r, c));
    }
    for (Eigen::Index i = 0; i < clf.b2.size(); ++i) append_f64_le(block, clf.b2(i));

    const off_t offset =
        static_cast<off_t>(kHeaderSize + static_cast<std::size_t>(index) * block.size());
    std::size_t written = 0;
    while (written < block.size()) {
        const ssize_t n = ::pwrite(fd_, block.data() + written, block.size() - written,
                                   offset + static_cast<off_t>(written));
        if (n < 0) throw_errno("write failed for", temp_path_);
        written += static_cast<std::size_t>(n);
    }
}

void EnsembleWriter::commit() {
    if (fd_ < 0) throw FormatError("EnsembleWriter: already committed");
    if (::fsync(fd_) != 0) throw_errno("fsync failed for", temp_path_);
    if (::close(fd_) != 0) throw_errno("close failed for", temp_path_);
    fd_ = -1;
    std::filesystem::rename(temp_path_, destination_);
}

EnsembleReader::EnsembleReader(const std::filesystem::path& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_RDONLY);
    if (fd_ < 0) throw_errno("cannot open ensemble file", path);

    unsigned char raw[kHeaderSize];
    if (::pread(fd_, raw, sizeof(raw), 0) != static_cast<ssize_t>(sizeof(raw))) {
        ::close(fd_);
        fd_ = -1;
        throw FormatError(path.string() + ": truncated ensemble header");
    }
    if (std::memcmp(raw, kEnsembleMagic, sizeof(kEnsembleMagic)) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw FormatError(path.string() + ": not a smoothcert ensemble file (bad magic)");
    }
    const unsigned char* p = raw + sizeof(kEnsembleMagic);
    auto get_u32 = [&p]() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{p[i]} << (8 * i);
        p += 4;
        return v;
    };
    auto get_u64 = [&p]() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t{p[i]} << (8 * i);
        p += 8;
        return v;
    };
    header_.version = get_u32();
    header_.n_classifiers = get_u32();
    header_.beta = read_f64_le(p);
    p += 8;
    header_.domain_size = get_u32();
    header_.num_classes = get_u32();
    header_.input_dim = get_u32();
    header_.hidden_units = get_u32();
    header_.epochs = get_u32();
    header_.learning_rate = read_f64_le(p);
    p += 8;
    header_.master_seed = get_u64();
    header_.training_fingerprint = get_u64();

    if (header_.version != 1) {
        ::close(fd_);
        fd_ = -1;
        throw FormatError(path.string() + ": unsupported ensemble format version " +
                          std::to_string(header_.version));
    }
    std::error_code ec;
    const auto actual = std::filesystem::file_size(path, ec);
    if (ec || actual != header_.file_size()) {
        ::close(fd_);
        fd_ = -1;
        throw FormatError(path.string() + ": ensemble file size does not match its header");
    }
}

EnsembleReader::~EnsembleReader() {
    if (fd_ >= 0) ::close(fd_);
}

Classifier EnsembleReader::read_classifier(std::uint32_t index) const {
    if (index >= header_.n_classifiers) {
        throw DimensionError("EnsembleReader: classifier index out of range");
    }
    const std::size_t block_size = header_.classifier_block_size();
    std::vector<unsigned char> block(block_size);
    const off_t offset = static_cast<off_t>(kHeaderSize + index * block_size);
    std::size_t done = 0;
    while (done < block_size) {
        const ssize_t n = ::pread(fd_, block.data() + done, block_size - done,
                                  offset + static_cast<off_t>(done));
        if (n <= 0) throw FormatError(path_.string() + ": short read inside classifier block");
        done += static_cast<std::size_t>(n);
    }

    Classifier clf;
    clf.feature_domain = header_.domain_size;
    clf.config = TrainConfig{header_.hidden_units, header_.epochs, header_.learning_rate};
    clf.seed = 0; // per-classifier seeds are derived, not stored
    const auto hidden = static_cast<Eigen::Index>(header_.hidden_units);
    const auto dim = static_cast<Eigen::Index>(header_.input_dim);
    const auto classes = static_cast<Eigen::Index>(header_.num_classes);
    clf.w1.resize(hidden, dim);
    clf.b1.resize(hidden);
    clf.w2.resize(classes, hidden);
    clf.b2.resize(classes);

    const unsigned char* cursor = block.data();
    auto take = [&cursor]() {
        const double v = read_f64_le(cursor);
        cursor += 8;
        return v;
    };
    for (Eigen::Index r = 0; r < hidden; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) clf.w1(r, c) = take();
    }
    for (Eigen::Index i = 0; i < hidden; ++i) clf.b1(i) = take();
    for (Eigen::Index r = 0; r < classes; ++r) {
        for (Eigen::Index c = 0; c < hidden; ++c) clf.w2(r, c) = take();
    }
    for (Eigen::Index i = 0; i < classes; ++i) clf.b2(i) = take();
    return clf;
}

} // namespace smoothcert
