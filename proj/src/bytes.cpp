#include "dualgc/bytes.hpp"

namespace dualgc {

std::string to_hex(ByteView bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

Bits to_bits(std::uint64_t value, std::size_t width) {
    Bits out(width, 0);
    for (std::size_t i = 0; i < width && i < 64; ++i) out[width - 1 - i] = (value >> i) & 1;
    return out;
}

std::uint64_t from_bits(std::span<const std::uint8_t> bits) {
    std::uint64_t v = 0;
    for (auto b : bits) v = (v << 1) | (b & 1);
    return v;
}

} // namespace dualgc
