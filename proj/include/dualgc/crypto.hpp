#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string_view>

#include "dualgc/bytes.hpp"

namespace dualgc {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(ByteView data);
Digest sha256(std::initializer_list<ByteView> parts);

// A 128-bit wire key.
struct Label {
    std::array<std::uint8_t, 16> bytes{};

    bool lsb() const { return bytes[15] & 1; }
    Label operator^(const Label& other) const {
        Label out;
        for (std::size_t i = 0; i < 16; ++i) out.bytes[i] = bytes[i] ^ other.bytes[i];
        return out;
    }
    Label& operator^=(const Label& other) {
        for (std::size_t i = 0; i < 16; ++i) bytes[i] ^= other.bytes[i];
        return *this;
    }
    friend bool operator==(const Label&, const Label&) = default;
    friend auto operator<=>(const Label&, const Label&) = default;
};

// Ordered (0-label, 1-label) pair for one wire.
struct Encoding {
    Label zero;
    Label one;

    const Label& label(bool bit) const { return bit ? one : zero; }
    bool valid() const { return zero != one; }
    friend bool operator==(const Encoding&, const Encoding&) = default;
};

// Deterministic random generator: AES-256-CTR keyed by SHA-256 of the seed material.
class Drbg {
public:
    explicit Drbg(ByteView seed);
    explicit Drbg(std::uint64_t seed);
    Drbg(const Drbg&) = delete;
    Drbg& operator=(const Drbg&) = delete;
    Drbg(Drbg&&) noexcept;
    Drbg& operator=(Drbg&&) noexcept;
    ~Drbg();

    void fill(std::uint8_t* out, std::size_t n);
    template <std::size_t N>
    std::array<std::uint8_t, N> bytes() {
        std::array<std::uint8_t, N> out{};
        fill(out.data(), N);
        return out;
    }
    Label label() {
        Label l;
        fill(l.bytes.data(), 16);
        return l;
    }
    std::uint64_t u64();
    bool bit() { return u64() & 1; }
    // Uniform in [0, bound).
    std::uint64_t below(std::uint64_t bound);
    // Uniform in [lo, hi].
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

    // Child generator bound to a label, independent of this generator's stream position.
    Drbg derive(std::string_view label) const;

private:
    void refill();

    Digest seed_{};
    struct Cipher;
    std::unique_ptr<Cipher> cipher_;
    std::array<std::uint8_t, 4096> buffer_{};
    std::size_t pos_ = 4096;
};

} // namespace dualgc
