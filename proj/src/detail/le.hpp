#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

namespace sarsub::detail {

inline std::uint32_t to_le32(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

inline std::uint64_t to_le64(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    return (std::uint64_t(to_le32(std::uint32_t(v))) << 32) | to_le32(std::uint32_t(v >> 32));
}

inline void put_f32(char* dst, float f) {
    const std::uint32_t v = to_le32(std::bit_cast<std::uint32_t>(f));
    std::memcpy(dst, &v, 4);
}

inline float get_f32(const char* src) {
    std::uint32_t v;
    std::memcpy(&v, src, 4);
    return std::bit_cast<float>(to_le32(v));
}

inline void put_u64(char* dst, std::uint64_t v) {
    v = to_le64(v);
    std::memcpy(dst, &v, 8);
}

inline std::uint64_t get_u64(const char* src) {
    std::uint64_t v;
    std::memcpy(&v, src, 8);
    return to_le64(v);
}

}  // namespace sarsub::detail
