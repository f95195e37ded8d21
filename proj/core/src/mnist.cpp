#include "smoothcert/mnist.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "smoothcert/errors.hpp"

namespace smoothcert {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

class IdxReader {
public:
    IdxReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) {
            throw FormatError("cannot open IDX file: " + path.string());
        }
    }

    std::uint32_t read_u32_be() {
        unsigned char bytes[4];
        in_.read(reinterpret_cast<char*>(bytes), 4);
        if (!in_) fail("truncated while reading a 32-bit field");
        offset_ += 4;
        return (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) |
               (std::uint32_t{bytes[2]} << 8) | std::uint32_t{bytes[3]};
    }

    void read_bytes(std::uint8_t* dst, std::size_t n) {
        in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (!in_) fail("truncated while reading " + std::to_string(n) + " data bytes");
        offset_ += n;
    }

    void expect_magic(std::uint32_t expected) {
        const std::uint32_t magic = read_u32_be();
        if (magic != expected) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "bad magic 0x%08x, expected 0x%08x", magic, expected);
            fail_at(0, buf);
        }
    }

    [[noreturn]] void fail(const std::string& what) const { fail_at(offset_, what); }

    [[noreturn]] void fail_at(std::size_t offset, const std::string& what) const {
        std::ostringstream msg;
        msg << path_.string() << " (byte offset " << offset << "): " << what;
        throw FormatError(msg.str());
    }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t offset_ = 0;
};

} // namespace

RawDataset load_idx(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path) {
    RawDataset out;

    IdxReader images(images_path);
    images.expect_magic(kImagesMagic);
    const std::uint32_t image_count = images.read_u32_be();
    out.rows = images.read_u32_be();
    out.cols = images.read_u32_be();
    if (out.rows == 0 || out.cols == 0) {
        images.fail("image dimensions must be positive");
    }
    out.pixels.resize(static_cast<std::size_t>(image_count) * out.rows * out.cols);
    images.read_bytes(out.pixels.data(), out.pixels.size());

    IdxReader labels(labels_path);
    labels.expect_magic(kLabelsMagic);
    const std::uint32_t label_count = labels.read_u32_be();
    if (label_count != image_count) {
        labels.fail("label count " + std::to_string(label_count) +
                    " does not match image count " + std::to_string(image_count));
    }
    out.labels.resize(label_count);
    labels.read_bytes(out.labels.data(), out.labels.size());

    return out;
}

} // namespace smoothcert
