#pragma once

// Little-endian primitive encoding shared by the IQAI and IQAE readers.

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace iqa::detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v & 0xffu), static_cast<char>((v >> 8) & 0xffu),
                                static_cast<char>((v >> 16) & 0xffu),
                                static_cast<char>((v >> 24) & 0xffu)};
    out.write(b.data(), 4);
}

inline void put_f32(std::ostream& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

inline void put_string(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw std::runtime_error(std::string("truncated input while reading ") + what);
}

inline std::uint32_t get_u32(std::istream& in, const char* what) {
    std::array<unsigned char, 4> b{};
    read_exact(in, reinterpret_cast<char*>(b.data()), 4, what);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

inline float get_f32(std::istream& in, const char* what) {
    return std::bit_cast<float>(get_u32(in, what));
}

inline std::string get_string(std::istream& in, const char* what, std::uint32_t max_len = 1u << 24) {
    const std::uint32_t n = get_u32(in, what);
    if (n > max_len) throw std::runtime_error(std::string("implausible string length in ") + what);
    std::string s(n, '\0');
    read_exact(in, s.data(), n, what);
    return s;
}

}  // namespace iqa::detail
