#pragma once

// Little-endian field helpers shared by the dataset and ensemble containers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "smoothcert/errors.hpp"

namespace smoothcert::detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

inline void put_f64(std::ostream& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline std::uint32_t get_u32(std::istream& in, const char* context) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in) throw FormatError(std::string("truncated file while reading ") + context);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes[i]} << (8 * i);
    return v;
}

inline std::uint64_t get_u64(std::istream& in, const char* context) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) throw FormatError(std::string("truncated file while reading ") + context);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes[i]} << (8 * i);
    return v;
}

inline double get_f64(std::istream& in, const char* context) {
    return std::bit_cast<double>(get_u64(in, context));
}

} // namespace smoothcert::detail
