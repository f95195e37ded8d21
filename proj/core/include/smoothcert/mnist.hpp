#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace smoothcert {

// Raw digit images as stored in the IDX container: one byte per pixel,
// one byte per label.
struct RawDataset {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::uint8_t> pixels; // count * rows * cols, row-major per image
    std::vector<std::uint8_t> labels; // count

    std::size_t count() const noexcept { return labels.size(); }
    const std::uint8_t* image(std::size_t i) const noexcept {
        return pixels.data() + i * rows * cols;
    }
};

// Parses the big-endian IDX pair (magic 0x00000803 for images, 0x00000801 for
// labels). Throws FormatError naming the offending byte offset on malformed
// input, and when the image and label counts disagree.
RawDataset load_idx(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path);

} // namespace smoothcert
