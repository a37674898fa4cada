#include "dualgc/output_verification.hpp"

#include <algorithm>

#include "dualgc/errors.hpp"
#include "dualgc/garble.hpp"

namespace dualgc::output {

using commit::Context;

namespace {

Bytes encodings_bytes(const std::vector<Encoding>& es) {
    Bytes out;
    out.reserve(32 * es.size());
    for (const auto& e : es) {
        out.insert(out.end(), e.zero.bytes.begin(), e.zero.bytes.end());
        out.insert(out.end(), e.one.bytes.begin(), e.one.bytes.end());
    }
    return out;
}

Bytes labels_bytes(const std::vector<Label>& ls) {
    Bytes out;
    out.reserve(16 * ls.size());
    for (const auto& l : ls) out.insert(out.end(), l.bytes.begin(), l.bytes.end());
    return out;
}

Label label_at(ByteView bytes, std::size_t off) {
    Label l;
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(off), 16, l.bytes.begin());
    return l;
}

void write_entry(ByteWriter& w, const ProviderEntry& e) { w.raw(e.e1.digest).raw(e.o2.digest).raw(e.e2.digest).raw(e.o1.digest); }

struct Opened {
    std::optional<Bytes> e1, o1, e2, o2;
};

Opened open_all(const ProviderEntry& c, const ProviderOpenings& o) {
    return {commit::open_tagged(c.e1, o.e1, Context::OutputEncoding), commit::open_tagged(c.o1, o.o1, Context::OutputLabel),
            commit::open_tagged(c.e2, o.e2, Context::OutputEncoding), commit::open_tagged(c.o2, o.o2, Context::OutputLabel)};
}

// Decodes one circuit's result; nullopt when the payloads do not decode.
std::optional<Bits> try_decode(const Bytes& enc, const Bytes& labels, std::size_t bits) {
    if (enc.size() != 32 * bits || labels.size() != 16 * bits) return std::nullopt;
    try {
        return garble::decode(parse_labels(labels), parse_encodings(enc));
    } catch (const DecodeError&) {
        return std::nullopt;
    }
}

} // namespace

std::vector<Encoding> parse_encodings(ByteView payload) {
    if (payload.size() % 32) throw FramingError("encoding list is not a multiple of 32 bytes");
    std::vector<Encoding> out;
    for (std::size_t off = 0; off < payload.size(); off += 32) out.push_back({label_at(payload, off), label_at(payload, off + 16)});
    return out;
}

std::vector<Label> parse_labels(ByteView payload) {
    if (payload.size() % 16) throw FramingError("label list is not a multiple of 16 bytes");
    std::vector<Label> out;
    for (std::size_t off = 0; off < payload.size(); off += 16) out.push_back(label_at(payload, off));
    return out;
}

Bytes OutputCommitmentBundle::serialize() const {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(providers.size()));
    for (const auto& e : providers) write_entry(w, e);
    return w.take();
}

OutputCommitmentBundle OutputCommitmentBundle::parse(ByteView bytes) {
    ByteReader r(bytes);
    OutputCommitmentBundle b;
    auto n = r.u32();
    if (static_cast<std::size_t>(n) * 128 != r.remaining()) throw FramingError("bundle length does not match its count");
    for (std::uint32_t i = 0; i < n; ++i) {
        ProviderEntry e;
        e.e1.digest = r.fixed<32>();
        e.o2.digest = r.fixed<32>();
        e.e2.digest = r.fixed<32>();
        e.o1.digest = r.fixed<32>();
        b.providers.push_back(e);
    }
    return b;
}

PartyOutput publish_output_commitments(int party, const std::vector<std::vector<Encoding>>& own_encodings,
                                       const std::vector<std::vector<Label>>& evaluated_labels, Drbg& rng) {
    if (party != 1 && party != 2) throw ProtocolError("party must be 1 or 2");
    if (own_encodings.size() != evaluated_labels.size())
        throw ProtocolError("output encodings and labels cover different provider counts");
    PartyOutput out;
    out.party = party;
    for (std::size_t u = 0; u < own_encodings.size(); ++u) {
        if (own_encodings[u].size() != evaluated_labels[u].size())
            throw ProtocolError("provider " + std::to_string(u) + ": output encoding and label counts differ");
        for (const auto& e : own_encodings[u])
            if (!e.valid()) throw ProtocolError("provider " + std::to_string(u) + ": degenerate output encoding");
        out.encodings.push_back(commit::commit_tagged(Context::OutputEncoding, encodings_bytes(own_encodings[u]), rng));
        out.labels.push_back(commit::commit_tagged(Context::OutputLabel, labels_bytes(evaluated_labels[u]), rng));
    }
    return out;
}

OutputCommitmentBundle make_bundle(const PartyOutput& p1, const PartyOutput& p2) {
    if (p1.party != 1 || p2.party != 2) throw ProtocolError("bundle halves from the wrong parties");
    if (p1.encodings.size() != p2.encodings.size()) throw ProtocolError("bundle halves cover different provider counts");
    OutputCommitmentBundle b;
    for (std::size_t u = 0; u < p1.encodings.size(); ++u)
        b.providers.push_back({p1.encodings[u].commitment, p1.labels[u].commitment, p2.encodings[u].commitment,
                               p2.labels[u].commitment});
    return b;
}

void ProviderOpenings::write(ByteWriter& w) const {
    commit::write(w, e1);
    commit::write(w, o1);
    commit::write(w, e2);
    commit::write(w, o2);
}

ProviderOpenings ProviderOpenings::read(ByteReader& r) {
    ProviderOpenings o;
    o.e1 = commit::read_opening(r);
    o.o1 = commit::read_opening(r);
    o.e2 = commit::read_opening(r);
    o.o2 = commit::read_opening(r);
    return o;
}

ProviderOpenings openings_for(std::size_t u, const PartyOutput& p1, const PartyOutput& p2) {
    // O_1 is held by P2 (evaluator of circuit 1), O_2 by P1.
    return {p1.encodings.at(u).opening, p2.labels.at(u).opening, p2.encodings.at(u).opening, p1.labels.at(u).opening};
}

Bytes OutputFailureProof::serialize() const {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(provider));
    openings.write(w);
    return w.take();
}

OutputFailureProof OutputFailureProof::parse(ByteView bytes) {
    ByteReader r(bytes);
    OutputFailureProof p;
    p.provider = r.u32();
    p.openings = ProviderOpenings::read(r);
    r.expect_done();
    return p;
}

OutputVerdict verify_output(std::size_t u, const OutputCommitmentBundle& bundle, const ProviderOpenings& openings,
                            std::size_t output_bits) {
    if (u >= bundle.providers.size()) throw ProtocolError("provider index outside the bundle");
    auto o = open_all(bundle.providers[u], openings);
    if (!o.e1 || !o.o2) throw OpeningError("P1", "output opening does not match the bundle");
    if (!o.e2 || !o.o1) throw OpeningError("P2", "output opening does not match the bundle");

    auto y1 = try_decode(*o.e1, *o.o1, output_bits);
    auto y2 = try_decode(*o.e2, *o.o2, output_bits);
    OutputVerdict v;
    if (y1 && y2 && *y1 == *y2) {
        v.accepted = true;
        v.y = *y1;
        return v;
    }
    v.reason = !y1 || !y2 ? "output labels do not decode" : "the two circuits disagree";
    v.proof = OutputFailureProof{u, openings};
    return v;
}

ProofStatus verify_failure_proof(const OutputFailureProof& proof, const OutputCommitmentBundle& bundle,
                                 std::size_t output_bits) {
    if (proof.provider >= bundle.providers.size()) return ProofStatus::Spurious;
    auto o = open_all(bundle.providers[proof.provider], proof.openings);
    if (!o.e1 || !o.o1 || !o.e2 || !o.o2) return ProofStatus::Spurious;
    auto y1 = try_decode(*o.e1, *o.o1, output_bits);
    auto y2 = try_decode(*o.e2, *o.o2, output_bits);
    if (y1 && y2 && *y1 == *y2) return ProofStatus::Spurious;
    return ProofStatus::Confirmed;
}

} // namespace dualgc::output
