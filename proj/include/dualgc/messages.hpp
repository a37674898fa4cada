#pragma once

// Wire messages, framing and the session transcript.
//
// frame = u32 length (payload + 9) || type tag || u64 session id || payload
// all big-endian.

#include <array>
#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dualgc/bytes.hpp"
#include "dualgc/crypto.hpp"

namespace dualgc::session {

enum class MessageType : std::uint8_t {
    InputCommitments = 1,
    CommitmentDigest,
    CoinCommit,
    CoinReveal,
    Challenge,
    CheckSetOpenings,
    EvalSetOpenings,
    HashTuple,
    Phase1Report,
    ProofOpeningRequest,
    ProofOpeningResponse,
    GarbledCircuit,
    OutputCommitments,
    BundleDigest,
    OutputOpenings,
    FailureProof,
    Abort,
};

inline constexpr std::size_t kFrameOverhead = 4 + 1 + 8;
inline constexpr std::size_t kHeaderAfterLength = 9;

std::string_view to_string(MessageType t);
bool known_type(std::uint8_t tag);

enum class RoleKind { Party, Provider };

// 0 = P1, 1 = P2, 2 + u = provider u.
using RoleId = int;
inline constexpr RoleId kP1 = 0;
inline constexpr RoleId kP2 = 1;
inline RoleId provider_role(std::size_t u) { return static_cast<RoleId>(2 + u); }
inline RoleKind kind_of(RoleId r) { return r < 2 ? RoleKind::Party : RoleKind::Provider; }
std::string role_name(RoleId r);

enum class Phase : std::uint8_t { Input = 1, Compute = 2, Output = 3 };

// Which sender/receiver kinds may carry a type, and in which phases.
struct Route {
    MessageType type;
    RoleKind from;
    RoleKind to;
    std::uint8_t phases;  // bit (phase - 1)
};
const std::vector<Route>& message_table();
bool route_allowed(MessageType t, RoleId from, RoleId to, Phase phase);

struct Message {
    MessageType type{};
    std::uint64_t session_id = 0;
    Bytes payload;
    friend bool operator==(const Message&, const Message&) = default;
};

// Throws FramingError if the payload does not fit the length field.
Bytes frame(const Message& m);
// Throws FramingError on truncated or overlong input, ProtocolError on an
// unknown tag.
Message unframe(ByteView bytes);
// Length of the frame starting at `bytes`, from its length field.
std::size_t frame_length(ByteView header);

struct TranscriptRow {
    Phase phase{};
    RoleId sender = 0;
    RoleId receiver = 0;
    MessageType type{};
    std::size_t bytes = 0;
    std::uint64_t micros = 0;
    Digest digest{};
};

// Append-only log of every framed message.
class Transcript {
public:
    Transcript() : start_(std::chrono::steady_clock::now()) {}
    void record(Phase phase, RoleId from, RoleId to, const Bytes& framed, MessageType type);
    const std::vector<TranscriptRow>& rows() const { return rows_; }
    std::size_t total_bytes() const;
    // Digest over every row except timing: equal for equal message streams.
    Digest content_digest() const;
    // phase,sender,receiver,type,bytes,micros
    std::string to_csv() const;

private:
    std::chrono::steady_clock::time_point start_;
    std::vector<TranscriptRow> rows_;
};

struct Measurement {
    std::size_t bytes_total = 0;
    std::array<std::size_t, 3> bytes_by_phase{};
    std::array<double, 3> seconds_by_phase{};
    std::size_t bytes_p1 = 0;
    std::size_t bytes_p2 = 0;
    std::size_t bytes_providers = 0;
};

Measurement measure(const Transcript& t);

// True when no provider sends to a party after the first OUTPUT_OPENINGS.
bool parties_blind_after_openings(const Transcript& t);
// Same property over the message table alone.
bool table_blind_after_openings();

} // namespace dualgc::session
