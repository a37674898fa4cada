#pragma once

// Hash commitments: digest = SHA-256(nonce || message).
//
// Every protocol message that is committed starts with a one-byte context tag
// so that an opening produced for one purpose cannot be replayed as another.

#include <array>
#include <cstdint>
#include <optional>

#include "dualgc/bytes.hpp"
#include "dualgc/crypto.hpp"

namespace dualgc::commit {

using Nonce = std::array<std::uint8_t, 16>;

enum class Context : std::uint8_t {
    InputSet = 0x01,
    Position = 0x02,
    LabelHash = 0x03,
    OutputEncoding = 0x04,
    OutputLabel = 0x05,
    CoinToss = 0x06,
};

struct Commitment {
    Digest digest{};
    friend bool operator==(const Commitment&, const Commitment&) = default;
};

struct Opening {
    Bytes message;
    Nonce randomness{};
    friend bool operator==(const Opening&, const Opening&) = default;
};

Commitment commit(ByteView message, const Nonce& randomness);
bool verify(const Commitment& c, const Opening& o);

// Builds the tagged message, commits to it and returns both halves.
struct Committed {
    Commitment commitment;
    Opening opening;
};
Committed commit_tagged(Context ctx, ByteView payload, Drbg& rng);
Bytes tagged(Context ctx, ByteView payload);

// Returns the payload if `o` opens `c` and carries the expected tag.
std::optional<Bytes> open_tagged(const Commitment& c, const Opening& o, Context ctx);

void write(ByteWriter& w, const Opening& o);
Opening read_opening(ByteReader& r);

} // namespace dualgc::commit
