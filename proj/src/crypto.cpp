#include "dualgc/crypto.hpp"

#include <cstring>

#include <openssl/evp.h>
#include <openssl/sha.h>

namespace dualgc {

Digest sha256(ByteView data) {
    Digest out;
    SHA256(data.data(), data.size(), out.data());
    return out;
}

Digest sha256(std::initializer_list<ByteView> parts) {
    Bytes joined;
    for (auto part : parts) joined.insert(joined.end(), part.begin(), part.end());
    return sha256(ByteView(joined));
}

struct Drbg::Cipher {
    EVP_CIPHER_CTX* ctx = nullptr;
    ~Cipher() { EVP_CIPHER_CTX_free(ctx); }
};

Drbg::Drbg(ByteView seed) : seed_(sha256(seed)), cipher_(std::make_unique<Cipher>()) {
    cipher_->ctx = EVP_CIPHER_CTX_new();
    std::array<std::uint8_t, 16> iv{};
    if (!cipher_->ctx || EVP_EncryptInit_ex(cipher_->ctx, EVP_aes_256_ctr(), nullptr, seed_.data(), iv.data()) != 1)
        throw Error("Drbg: cipher initialisation failed");
}

namespace {
std::array<std::uint8_t, 8> seed_bytes(std::uint64_t seed) {
    std::array<std::uint8_t, 8> out{};
    for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
    return out;
}
} // namespace

Drbg::Drbg(std::uint64_t seed) : Drbg(ByteView(seed_bytes(seed))) {}

Drbg::Drbg(Drbg&&) noexcept = default;
Drbg& Drbg::operator=(Drbg&&) noexcept = default;
Drbg::~Drbg() = default;

void Drbg::refill() {
    std::array<std::uint8_t, 4096> zeros{};
    int len = 0;
    EVP_EncryptUpdate(cipher_->ctx, buffer_.data(), &len, zeros.data(), static_cast<int>(zeros.size()));
    pos_ = 0;
}

void Drbg::fill(std::uint8_t* out, std::size_t n) {
    while (n > 0) {
        if (pos_ == buffer_.size()) refill();
        std::size_t take = std::min(n, buffer_.size() - pos_);
        std::memcpy(out, buffer_.data() + pos_, take);
        pos_ += take;
        out += take;
        n -= take;
    }
}

std::uint64_t Drbg::u64() {
    std::array<std::uint8_t, 8> b{};
    fill(b.data(), 8);
    std::uint64_t v = 0;
    for (auto x : b) v = (v << 8) | x;
    return v;
}

std::uint64_t Drbg::below(std::uint64_t bound) {
    if (bound == 0) return 0;
    // Rejection sampling removes modulo bias.
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    for (;;) {
        auto v = u64();
        if (v < limit) return v % bound;
    }
}

Drbg Drbg::derive(std::string_view label) const {
    auto bytes = ByteView(reinterpret_cast<const std::uint8_t*>(label.data()), label.size());
    auto child = sha256({ByteView(seed_), bytes});
    return Drbg(ByteView(child));
}

} // namespace dualgc
