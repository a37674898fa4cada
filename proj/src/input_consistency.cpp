#include "dualgc/input_consistency.hpp"

#include <algorithm>

#include "dualgc/errors.hpp"

namespace dualgc::consistency {

using commit::Commitment;
using commit::Context;
using commit::Opening;

namespace {

void require_copies(std::size_t s) {
    if (s < kMinCopies || s > kMaxCopies)
        throw InputShapeError("copy count s must be in [2, 64], got " + std::to_string(s));
}

Bytes label_pair_bytes(const Label& a, const Label& b, const Label& c) {
    Bytes out;
    out.reserve(48);
    out.insert(out.end(), a.bytes.begin(), a.bytes.end());
    out.insert(out.end(), b.bytes.begin(), b.bytes.end());
    out.insert(out.end(), c.bytes.begin(), c.bytes.end());
    return out;
}

Digest hash_label(const Label& k) { return sha256(ByteView(k.bytes)); }

Digest xor_digests(ByteView list) {
    Digest acc{};
    for (std::size_t off = 0; off + 32 <= list.size(); off += 32)
        for (std::size_t i = 0; i < 32; ++i) acc[i] ^= list[off + i];
    return acc;
}

Triple open_triple(const Commitment& c, const Opening& o) {
    auto payload = commit::open_tagged(c, o, Context::InputSet);
    if (!payload || payload->size() != 48) throw OpeningError("provider", "triple opening does not match its commitment");
    return Triple::parse(*payload);
}

bool open_position(const Commitment& c, const Opening& o) {
    auto payload = commit::open_tagged(c, o, Context::Position);
    if (!payload || payload->size() != 1 || (*payload)[0] > 1)
        throw OpeningError("provider", "position opening does not match its commitment");
    return (*payload)[0] == 1;
}

void write_commitment(ByteWriter& w, const Commitment& c) { w.raw(c.digest); }
Commitment read_commitment(ByteReader& r) { return {r.fixed<32>()}; }

} // namespace

Bytes Triple::serialize() const { return label_pair_bytes(first, second, cross); }

Triple Triple::parse(ByteView bytes) {
    if (bytes.size() != 48) throw FramingError("triple must be 48 bytes");
    Triple t;
    std::copy_n(bytes.begin(), 16, t.first.bytes.begin());
    std::copy_n(bytes.begin() + 16, 16, t.second.bytes.begin());
    std::copy_n(bytes.begin() + 32, 16, t.cross.bytes.begin());
    return t;
}

std::size_t ProviderMaterial::commitment_count() const {
    std::size_t n = 0;
    for (const auto& w : wires) n += 5 * w.commitments.size();
    return n;
}

std::vector<std::vector<PairCommitments>> ProviderMaterial::public_commitments() const {
    std::vector<std::vector<PairCommitments>> out;
    out.reserve(wires.size());
    for (const auto& w : wires) out.push_back(w.commitments);
    return out;
}

ProviderMaterial generate_input_material(const Bits& x, std::size_t s, Drbg& rng,
                                         const std::optional<Inconsistency>& deviation) {
    require_copies(s);
    ProviderMaterial m;
    m.copies = s;
    m.input = x;
    m.wires.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool xi = x[i] != 0;
        const bool deviate =
            deviation && std::find(deviation->wires.begin(), deviation->wires.end(), i) != deviation->wires.end();
        auto& wire = m.wires[i];
        for (std::size_t j = 0; j < s; ++j) {
            CopySecret sec;
            do {
                sec.circuit1 = {rng.label(), rng.label()};
            } while (!sec.circuit1.valid());
            do {
                sec.circuit2 = {rng.label(), rng.label()};
            } while (!sec.circuit2.valid());
            sec.b = rng.bit();
            const bool p = sec.b != xi;

            // Cross labels per set: W uses bit b, W' uses 1 - b.
            std::array<bool, 2> set_bit{sec.b, !sec.b};
            std::array<std::array<Triple, 2>, 2> triples;
            for (int set = 0; set < 2; ++set) {
                triples[set][0] = {sec.circuit1.zero, sec.circuit1.one, sec.circuit2.label(set_bit[set])};
                triples[set][1] = {sec.circuit2.zero, sec.circuit2.one, sec.circuit1.label(set_bit[set])};
            }
            if (deviate && !((deviation->consistent_mask >> j) & 1)) {
                triples[p ? 1 : 0][1].cross = sec.circuit1.label(!xi);
            }

            PairCommitments pc;
            PairOpenings po;
            for (int k = 0; k < 2; ++k) {
                auto cw = commit::commit_tagged(Context::InputSet, triples[0][k].serialize(), rng);
                auto cwp = commit::commit_tagged(Context::InputSet, triples[1][k].serialize(), rng);
                pc.w[k] = cw.commitment;
                po.w[k] = cw.opening;
                pc.w_prime[k] = cwp.commitment;
                po.w_prime[k] = cwp.opening;
            }
            Bytes pos{static_cast<std::uint8_t>(p)};
            auto cp = commit::commit_tagged(Context::Position, pos, rng);
            pc.position = cp.commitment;
            po.position = cp.opening;

            wire.copies.push_back(sec);
            wire.commitments.push_back(pc);
            wire.openings.push_back(po);
        }
    }
    return m;
}

Digest commitments_digest(const std::vector<std::vector<PairCommitments>>& wires) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(wires.size()));
    for (const auto& wire : wires) {
        w.u32(static_cast<std::uint32_t>(wire.size()));
        for (const auto& c : wire) {
            for (const auto& x : c.w) write_commitment(w, x);
            for (const auto& x : c.w_prime) write_commitment(w, x);
            write_commitment(w, c.position);
        }
    }
    return sha256(w.bytes());
}

std::uint64_t copies_mask(std::size_t s) { return s >= 64 ? ~0ull : (1ull << s) - 1; }

CoinShare commit_coin(const std::vector<std::uint64_t>& masks, Drbg& rng) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(masks.size()));
    for (auto m : masks) w.u64(m);
    auto c = commit::commit_tagged(Context::CoinToss, w.bytes(), rng);
    return {c.commitment, c.opening};
}

std::vector<std::uint64_t> open_coin(const Commitment& c, const Opening& o, int party, std::size_t wires,
                                     std::size_t s) {
    auto payload = commit::open_tagged(c, o, Context::CoinToss);
    if (!payload) throw CoinTossCheatError(party);
    try {
        ByteReader r(*payload);
        auto n = r.u32();
        if (n != wires) throw CoinTossCheatError(party);
        std::vector<std::uint64_t> masks(n);
        for (auto& m : masks) m = r.u64() & copies_mask(s);
        r.expect_done();
        return masks;
    } catch (const FramingError&) {
        throw CoinTossCheatError(party);
    }
}

bool valid_challenge(std::uint64_t rho, std::size_t s) {
    rho &= copies_mask(s);
    return rho != 0 && rho != copies_mask(s);
}

ChallengeString coin_toss(const CoinShare& p1, const CoinShare& p2, std::size_t wires, std::size_t s) {
    require_copies(s);
    auto a = open_coin(p1.commitment, p1.opening, 1, wires, s);
    auto b = open_coin(p2.commitment, p2.opening, 2, wires, s);
    ChallengeString out;
    out.rho.resize(wires);
    for (std::size_t i = 0; i < wires; ++i) {
        out.rho[i] = (a[i] ^ b[i]) & copies_mask(s);
        if (!valid_challenge(out.rho[i], s)) out.retoss.push_back(i);
    }
    return out;
}

std::vector<std::size_t> evaluation_copies(std::uint64_t rho, std::size_t s) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < s; ++j)
        if (!((rho >> j) & 1)) out.push_back(j);
    return out;
}

CheckOpening check_opening(const WireMaterial& m, std::size_t copy) {
    return {m.openings.at(copy).w, m.openings.at(copy).w_prime};
}

std::optional<BadInput> check_construction(const PairCommitments& c, const CheckOpening& o, std::size_t provider,
                                           std::size_t wire, std::size_t copy) {
    auto bad = [&](std::string reason) { return BadInput{provider, wire, copy, std::move(reason)}; };
    std::array<std::array<Triple, 2>, 2> t;
    for (int k = 0; k < 2; ++k) {
        t[0][k] = open_triple(c.w[k], o.w[k]);
        t[1][k] = open_triple(c.w_prime[k], o.w_prime[k]);
    }
    std::array<int, 2> cross_bit{};
    for (int set = 0; set < 2; ++set) {
        const auto& first = t[set][0];
        const auto& second = t[set][1];
        if (first.first == first.second || second.first == second.second)
            return bad("degenerate encoding");
        if (first.first == second.cross && second.first == first.cross)
            cross_bit[set] = 0;
        else if (first.second == second.cross && second.second == first.cross)
            cross_bit[set] = 1;
        else
            return bad("cross labels inconsistent");
    }
    if (t[0][0].encoding() != t[1][0].encoding() || t[0][1].encoding() != t[1][1].encoding())
        return bad("W and W' carry different encodings");
    if (cross_bit[0] == cross_bit[1]) return bad("W and W' select the same bit");
    return std::nullopt;
}

EvalOpening eval_opening(const WireMaterial& m, std::size_t copy, int party) {
    const auto& o = m.openings.at(copy);
    // Committed message is tag || p.
    bool p = o.position.message.at(1) == 1;
    const auto& set = p ? o.w_prime : o.w;
    return {o.position, set.at(party - 1)};
}

Triple open_eval(const PairCommitments& c, const EvalOpening& o, int party) {
    bool p = open_position(c.position, o.position);
    const auto& set = p ? c.w_prime : c.w;
    return open_triple(set.at(party - 1), o.triple);
}

LabelHashes hash_triples(const std::vector<Triple>& triples, Drbg& rng) {
    LabelHashes out;
    std::array<Bytes, 3> lists;
    for (const auto& t : triples) {
        std::array<const Label*, 3> ks{&t.first, &t.second, &t.cross};
        for (int q = 0; q < 3; ++q) {
            auto h = hash_label(*ks[q]);
            lists[q].insert(lists[q].end(), h.begin(), h.end());
            for (std::size_t i = 0; i < 32; ++i) out.h[q][i] ^= h[i];
        }
    }
    for (int q = 0; q < 3; ++q) out.c[q] = commit::commit_tagged(Context::LabelHash, lists[q], rng);
    return out;
}

void HashTuple::write(ByteWriter& w) const {
    w.raw(h[0]).raw(h[1]);
    write_commitment(w, c[0]);
    write_commitment(w, c[1]);
    write_commitment(w, c3);
}

HashTuple HashTuple::read(ByteReader& r) {
    HashTuple t;
    t.h[0] = r.fixed<32>();
    t.h[1] = r.fixed<32>();
    t.c[0] = read_commitment(r);
    t.c[1] = read_commitment(r);
    t.c3 = read_commitment(r);
    return t;
}

HashTuple make_hash_tuple(const LabelHashes& mine, bool swap) {
    HashTuple t;
    int a = swap ? 1 : 0;
    int b = 1 - a;
    t.h = {mine.h[a], mine.h[b]};
    t.c = {mine.c[a].commitment, mine.c[b].commitment};
    t.c3 = mine.c[2].commitment;
    return t;
}

bool membership(const LabelHashes& mine, const HashTuple& theirs) {
    return mine.h[2] == theirs.h[0] || mine.h[2] == theirs.h[1];
}

ConsistencyProof make_proof(std::size_t provider, std::size_t wire, int accuser, const HashTuple& accused,
                            const LabelHashes& mine, std::vector<EvalOpening> provider_openings) {
    ConsistencyProof p;
    p.provider = provider;
    p.wire = wire;
    p.accuser = accuser;
    p.accused = accused;
    p.h3 = mine.h[2];
    p.c3 = mine.c[2].commitment;
    p.provider_openings = std::move(provider_openings);
    return p;
}

Bytes ConsistencyProof::serialize() const {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(provider)).u32(static_cast<std::uint32_t>(wire)).u8(static_cast<std::uint8_t>(accuser));
    accused.write(w);
    w.raw(h3);
    write_commitment(w, c3);
    w.u32(static_cast<std::uint32_t>(provider_openings.size()));
    for (const auto& o : provider_openings) {
        commit::write(w, o.position);
        commit::write(w, o.triple);
    }
    return w.take();
}

ConsistencyProof ConsistencyProof::parse(ByteView bytes) {
    ByteReader r(bytes);
    ConsistencyProof p;
    p.provider = r.u32();
    p.wire = r.u32();
    p.accuser = r.u8();
    if (p.accuser != 1 && p.accuser != 2) throw FramingError("proof accuser must be 1 or 2");
    p.accused = HashTuple::read(r);
    p.h3 = r.fixed<32>();
    p.c3 = read_commitment(r);
    auto n = r.u32();
    if (n > kMaxCopies) throw FramingError("proof lists too many openings");
    for (std::uint32_t i = 0; i < n; ++i) {
        EvalOpening o;
        o.position = commit::read_opening(r);
        o.triple = commit::read_opening(r);
        p.provider_openings.push_back(std::move(o));
    }
    r.expect_done();
    return p;
}

ProofCheck verify_consistency_proof(const ConsistencyProof& proof, const ProofEvidence& ev) {
    const int accuser = proof.accuser;
    const int other = 3 - accuser;
    auto party = [](int k, std::string reason) { return ProofCheck{ProofVerdict::CheatingParty, k, std::move(reason)}; };

    if (!(proof.accused == ev.accused_tuple)) return party(accuser, "proof misquotes the other party's hash tuple");
    if (!(proof.c3 == ev.accuser_c3)) return party(accuser, "proof commitment differs from the one sent earlier");
    if (!valid_challenge(ev.rho, ev.copies)) return party(accuser, "challenge string is not valid");
    const auto J = evaluation_copies(ev.rho, ev.copies);
    if (ev.provider_commitments.size() != ev.copies) return party(other, "provider commitments incomplete");

    std::array<Bytes, 2> lists;
    for (int q = 0; q < 2; ++q) {
        auto payload = commit::open_tagged(proof.accused.c[q], ev.accused_lists[q], Context::LabelHash);
        if (!payload) return party(other, "hash list opening does not match");
        lists[q] = std::move(*payload);
    }
    auto own = commit::open_tagged(proof.c3, ev.accuser_list, Context::LabelHash);
    if (!own) return party(accuser, "hash list opening does not match");
    Bytes list3 = std::move(*own);

    const std::size_t len = 32 * J.size();
    for (int q = 0; q < 2; ++q)
        if (lists[q].size() != len || xor_digests(lists[q]) != proof.accused.h[q])
            return party(other, "hash list does not reproduce its XOR");
    if (list3.size() != len || xor_digests(list3) != proof.h3) return party(accuser, "hash list does not reproduce its XOR");

    // Bind the accuser's list to what the provider actually opened.
    if (proof.provider_openings.size() != J.size()) return party(accuser, "provider openings do not cover the evaluation copies");
    for (std::size_t idx = 0; idx < J.size(); ++idx) {
        Triple t;
        try {
            t = open_eval(ev.provider_commitments[J[idx]], proof.provider_openings[idx], accuser);
        } catch (const OpeningError&) {
            return party(accuser, "forwarded provider opening does not match");
        }
        auto h = hash_label(t.cross);
        if (!std::equal(h.begin(), h.end(), list3.begin() + 32 * idx))
            return party(accuser, "hash list disagrees with the provider's openings");
    }

    for (int q = 0; q < 2; ++q)
        if (lists[q] == list3) return {ProofVerdict::ProofInvalid, 0, "labels are consistent with one encoding position"};
    return {ProofVerdict::CheatingProvider, 0, "labels mix both encoding positions"};
}

FinalWireLabels evaluate_final_labels(const std::vector<Triple>& triples) {
    if (triples.empty()) throw InputShapeError("final labels need at least one evaluation copy");
    FinalWireLabels f;
    for (const auto& t : triples) {
        f.own.zero ^= t.first;
        f.own.one ^= t.second;
        f.cross ^= t.cross;
    }
    return f;
}

bool undetected(std::uint64_t consistent_mask, std::uint64_t rho, std::size_t s, Drbg& rng) {
    Bits x{static_cast<std::uint8_t>(rng.bit())};
    auto m = generate_input_material(x, s, rng, Inconsistency{consistent_mask, {0}});
    const auto& wire = m.wires[0];
    for (std::size_t j = 0; j < s; ++j) {
        if (!((rho >> j) & 1)) continue;
        if (check_construction(wire.commitments[j], check_opening(wire, j), 0, 0, j)) return false;
    }
    std::array<std::vector<Triple>, 2> triples;
    for (auto j : evaluation_copies(rho, s))
        for (int k = 1; k <= 2; ++k) triples[k - 1].push_back(open_eval(wire.commitments[j], eval_opening(wire, j, k), k));
    auto h1 = hash_triples(triples[0], rng);
    auto h2 = hash_triples(triples[1], rng);
    return membership(h1, make_hash_tuple(h2, rng.bit())) && membership(h2, make_hash_tuple(h1, rng.bit()));
}

Exposure exposure(std::uint64_t consistent_mask, std::size_t s, Drbg& rng) {
    require_copies(s);
    Exposure e;
    for (std::uint64_t rho = 0; rho <= copies_mask(s); ++rho) {
        if (!valid_challenge(rho, s)) continue;
        ++e.challenges;
        if (undetected(consistent_mask, rho, s, rng)) ++e.undetected;
        if (rho == copies_mask(s)) break;
    }
    return e;
}

} // namespace dualgc::consistency
