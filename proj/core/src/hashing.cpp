#include "smoothcert/hashing.hpp"

#include <fstream>
#include <span>

#include "smoothcert/errors.hpp"

namespace smoothcert {

std::uint64_t hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open for hashing: " + path.string());
    StreamHash h;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        h.update(std::as_bytes(std::span<const char>(buf, static_cast<std::size_t>(in.gcount()))));
    }
    return h.digest();
}

} // namespace smoothcert
