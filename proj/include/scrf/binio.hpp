#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "scrf/errors.hpp"

namespace scrf::detail {

// All on-disk integers and doubles are little-endian.

template <typename T>
inline void write_le(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char buf[sizeof(T)];
        std::memcpy(buf, &value, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
        os.write(reinterpret_cast<const char*>(buf), sizeof(T));
    } else {
        os.write(reinterpret_cast<const char*>(&value), sizeof(T));
    }
}

template <typename T>
inline T read_le(std::istream& is) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char buf[sizeof(T)];
    is.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!is) throw format_error("unexpected end of stream");
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

inline void write_magic(std::ostream& os, const char* magic, std::size_t n) {
    os.write(magic, static_cast<std::streamsize>(n));
}

inline void expect_magic(std::istream& is, const char* magic, std::size_t n) {
    std::string buf(n, '\0');
    is.read(buf.data(), static_cast<std::streamsize>(n));
    if (!is || buf != std::string(magic, n)) throw format_error("bad magic");
}

}  // namespace scrf::detail
