#include "dualgc/messages.hpp"

#include <sstream>

#include "dualgc/errors.hpp"

namespace dualgc::session {

namespace {

constexpr std::uint8_t P1 = 1, P2 = 2, P3 = 4;

constexpr std::array<std::string_view, 17> kNames{
    "INPUT_COMMITMENTS", "COMMITMENT_DIGEST", "COIN_COMMIT",       "COIN_REVEAL",          "CHALLENGE",
    "CHECKSET_OPENINGS", "EVALSET_OPENINGS",  "HASH_TUPLE",        "PHASE1_REPORT",        "PROOF_OPENING_REQUEST",
    "PROOF_OPENING_RESPONSE", "GARBLED_CIRCUIT", "OUTPUT_COMMITMENTS", "BUNDLE_DIGEST", "OUTPUT_OPENINGS",
    "FAILURE_PROOF",     "ABORT",
};

} // namespace

std::string_view to_string(MessageType t) {
    auto i = static_cast<std::size_t>(t);
    return i >= 1 && i <= kNames.size() ? kNames[i - 1] : "UNKNOWN";
}

bool known_type(std::uint8_t tag) { return tag >= 1 && tag <= kNames.size(); }

std::string role_name(RoleId r) {
    if (r == kP1) return "P1";
    if (r == kP2) return "P2";
    return "D" + std::to_string(r - 2);
}

const std::vector<Route>& message_table() {
    using MT = MessageType;
    using RK = RoleKind;
    static const std::vector<Route> table{
        {MT::InputCommitments, RK::Provider, RK::Party, P1},
        {MT::CommitmentDigest, RK::Party, RK::Party, P1},
        {MT::CoinCommit, RK::Party, RK::Party, P1},
        {MT::CoinReveal, RK::Party, RK::Party, P1},
        {MT::Challenge, RK::Party, RK::Provider, P1},
        {MT::CheckSetOpenings, RK::Provider, RK::Party, P1},
        {MT::EvalSetOpenings, RK::Provider, RK::Party, P1},
        {MT::HashTuple, RK::Party, RK::Party, P1},
        {MT::Phase1Report, RK::Party, RK::Provider, P1},
        {MT::ProofOpeningRequest, RK::Provider, RK::Party, P1},
        {MT::ProofOpeningResponse, RK::Party, RK::Provider, P1},
        {MT::GarbledCircuit, RK::Party, RK::Party, P2},
        {MT::OutputCommitments, RK::Party, RK::Provider, P3},
        {MT::BundleDigest, RK::Provider, RK::Provider, P3},
        {MT::OutputOpenings, RK::Party, RK::Provider, P3},
        {MT::FailureProof, RK::Provider, RK::Provider, P3},
        {MT::Abort, RK::Party, RK::Party, P1 | P2},
        {MT::Abort, RK::Party, RK::Provider, P1 | P2 | P3},
        {MT::Abort, RK::Provider, RK::Party, P1},
        {MT::Abort, RK::Provider, RK::Provider, P1 | P3},
    };
    return table;
}

bool route_allowed(MessageType t, RoleId from, RoleId to, Phase phase) {
    auto bit = static_cast<std::uint8_t>(1u << (static_cast<unsigned>(phase) - 1));
    for (const auto& r : message_table())
        if (r.type == t && r.from == kind_of(from) && r.to == kind_of(to) && (r.phases & bit)) return true;
    return false;
}

Bytes frame(const Message& m) {
    if (m.payload.size() > 0xffffffffull - kHeaderAfterLength) throw FramingError("payload too large to frame");
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(m.payload.size() + kHeaderAfterLength));
    w.u8(static_cast<std::uint8_t>(m.type)).u64(m.session_id);
    w.raw(ByteView(m.payload));
    return w.take();
}

std::size_t frame_length(ByteView header) {
    if (header.size() < 4) throw FramingError("frame shorter than its length field");
    ByteReader r(header.first(4));
    return 4 + static_cast<std::size_t>(r.u32());
}

Message unframe(ByteView bytes) {
    if (bytes.size() < kFrameOverhead) throw FramingError("frame shorter than its header");
    auto len = frame_length(bytes);
    if (len < kFrameOverhead) throw FramingError("frame length field below the header size");
    if (bytes.size() < len) throw FramingError("truncated frame");
    if (bytes.size() > len) throw FramingError("overlong frame");
    ByteReader r(bytes.subspan(4));
    auto tag = r.u8();
    if (!known_type(tag)) throw ProtocolError("unknown message tag " + std::to_string(tag));
    Message m;
    m.type = static_cast<MessageType>(tag);
    m.session_id = r.u64();
    auto rest = r.raw(r.remaining());
    m.payload.assign(rest.begin(), rest.end());
    return m;
}

void Transcript::record(Phase phase, RoleId from, RoleId to, const Bytes& framed, MessageType type) {
    auto now = std::chrono::steady_clock::now();
    TranscriptRow row;
    row.phase = phase;
    row.sender = from;
    row.receiver = to;
    row.type = type;
    row.bytes = framed.size();
    row.micros = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(now - start_).count());
    row.digest = sha256(framed);
    rows_.push_back(row);
}

std::size_t Transcript::total_bytes() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.bytes;
    return n;
}

Digest Transcript::content_digest() const {
    ByteWriter w;
    for (const auto& r : rows_) {
        w.u8(static_cast<std::uint8_t>(r.phase)).u16(static_cast<std::uint16_t>(r.sender)).u16(static_cast<std::uint16_t>(r.receiver));
        w.u8(static_cast<std::uint8_t>(r.type)).u64(r.bytes).raw(r.digest);
    }
    return sha256(w.bytes());
}

std::string Transcript::to_csv() const {
    std::ostringstream out;
    out << "phase,sender,receiver,type,bytes,micros\n";
    for (const auto& r : rows_)
        out << static_cast<int>(r.phase) << ',' << role_name(r.sender) << ',' << role_name(r.receiver) << ','
            << to_string(r.type) << ',' << r.bytes << ',' << r.micros << '\n';
    return out.str();
}

Measurement measure(const Transcript& t) {
    Measurement m;
    std::array<std::uint64_t, 3> first{}, last{};
    std::array<bool, 3> seen{};
    std::uint64_t prev_end = 0;
    for (const auto& r : t.rows()) {
        auto p = static_cast<std::size_t>(r.phase) - 1;
        m.bytes_total += r.bytes;
        m.bytes_by_phase[p] += r.bytes;
        if (r.sender == kP1) m.bytes_p1 += r.bytes;
        else if (r.sender == kP2) m.bytes_p2 += r.bytes;
        else m.bytes_providers += r.bytes;
        if (!seen[p]) {
            first[p] = prev_end;
            seen[p] = true;
        }
        last[p] = r.micros;
        prev_end = r.micros;
    }
    for (std::size_t p = 0; p < 3; ++p)
        if (seen[p]) m.seconds_by_phase[p] = static_cast<double>(last[p] - first[p]) / 1e6;
    return m;
}

bool parties_blind_after_openings(const Transcript& t) {
    bool opened = false;
    for (const auto& r : t.rows()) {
        if (r.type == MessageType::OutputOpenings) opened = true;
        if (opened && kind_of(r.sender) == RoleKind::Provider && kind_of(r.receiver) == RoleKind::Party) return false;
    }
    return true;
}

bool table_blind_after_openings() {
    for (const auto& r : message_table())
        if (r.from == RoleKind::Provider && r.to == RoleKind::Party && (r.phases & P3)) return false;
    return true;
}

} // namespace dualgc::session
