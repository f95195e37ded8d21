#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>

namespace smoothcert {

// FNV-1a 64. Content fingerprints only, not cryptographic.
class StreamHash {
public:
    void update(std::span<const std::byte> bytes) noexcept {
        for (std::byte b : bytes) {
            state_ ^= static_cast<std::uint64_t>(b);
            state_ *= 0x100000001b3ULL;
        }
    }

    void update_u32(std::uint32_t v) noexcept {
        std::byte bytes[4];
        for (int i = 0; i < 4; ++i) bytes[i] = static_cast<std::byte>(v >> (8 * i));
        update(bytes);
    }

    void update_u64(std::uint64_t v) noexcept {
        std::byte bytes[8];
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<std::byte>(v >> (8 * i));
        update(bytes);
    }

    void update_f64(double v) noexcept { update_u64(std::bit_cast<std::uint64_t>(v)); }

    std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

// Hash of a whole file's contents; used by determinism checks.
std::uint64_t hash_file(const std::filesystem::path& path);

} // namespace smoothcert
