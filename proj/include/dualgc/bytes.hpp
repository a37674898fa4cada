#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dualgc/errors.hpp"

namespace dualgc {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// Bit vectors hold one bit per element (0 or 1).
using Bits = std::vector<std::uint8_t>;

std::string to_hex(ByteView bytes);

// Big-endian append-only encoder used for every wire payload and committed message.
class ByteWriter {
public:
    ByteWriter& u8(std::uint8_t v) {
        out_.push_back(v);
        return *this;
    }
    ByteWriter& u16(std::uint16_t v) { return be(v, 2); }
    ByteWriter& u32(std::uint32_t v) { return be(v, 4); }
    ByteWriter& u64(std::uint64_t v) { return be(v, 8); }
    ByteWriter& raw(ByteView bytes) {
        out_.insert(out_.end(), bytes.begin(), bytes.end());
        return *this;
    }
    template <std::size_t N>
    ByteWriter& raw(const std::array<std::uint8_t, N>& bytes) {
        return raw(ByteView(bytes));
    }
    // u32 length prefix followed by the bytes.
    ByteWriter& blob(ByteView bytes) {
        u32(static_cast<std::uint32_t>(bytes.size()));
        return raw(bytes);
    }

    const Bytes& bytes() const& { return out_; }
    Bytes take() { return std::move(out_); }

private:
    ByteWriter& be(std::uint64_t v, int width) {
        for (int i = width - 1; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        return *this;
    }
    Bytes out_;
};

// Bounds-checked big-endian decoder. Running past the end throws FramingError.
class ByteReader {
public:
    explicit ByteReader(ByteView data) : data_(data) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(be(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(be(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(be(4)); }
    std::uint64_t u64() { return be(8); }
    ByteView raw(std::size_t n) {
        need(n);
        auto view = data_.subspan(pos_, n);
        pos_ += n;
        return view;
    }
    template <std::size_t N>
    std::array<std::uint8_t, N> fixed() {
        std::array<std::uint8_t, N> out{};
        auto view = raw(N);
        std::copy(view.begin(), view.end(), out.begin());
        return out;
    }
    Bytes blob() {
        auto n = u32();
        auto view = raw(n);
        return Bytes(view.begin(), view.end());
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }
    void expect_done() const {
        if (!done()) throw FramingError("trailing bytes in payload");
    }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw FramingError("payload truncated");
    }
    std::uint64_t be(int width) {
        need(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) v = (v << 8) | data_[pos_ + i];
        pos_ += static_cast<std::size_t>(width);
        return v;
    }

    ByteView data_;
    std::size_t pos_ = 0;
};

// Unsigned integer <-> big-endian bit vector of the given width.
Bits to_bits(std::uint64_t value, std::size_t width);
std::uint64_t from_bits(std::span<const std::uint8_t> bits);

} // namespace dualgc
