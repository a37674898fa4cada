#include "dualgc/session.hpp"

#include <algorithm>
#include <future>
#include <set>
#include <type_traits>

#include "dualgc/errors.hpp"
#include "dualgc/input_consistency.hpp"
#include "dualgc/output_verification.hpp"

namespace dualgc::session {

using commit::Commitment;
using commit::Opening;
using consistency::CheckOpening;
using consistency::EvalOpening;
using consistency::HashTuple;
using consistency::LabelHashes;
using consistency::PairCommitments;
using consistency::Triple;

namespace {

constexpr std::size_t kMaxCoinRounds = 128;

// --- payload helpers -------------------------------------------------------------

void write_commitment(ByteWriter& w, const Commitment& c) { w.raw(c.digest); }
Commitment read_commitment(ByteReader& r) { return {r.fixed<32>()}; }

void write_pair(ByteWriter& w, const PairCommitments& c) {
    for (const auto& x : c.w) write_commitment(w, x);
    for (const auto& x : c.w_prime) write_commitment(w, x);
    write_commitment(w, c.position);
}

PairCommitments read_pair(ByteReader& r) {
    PairCommitments c;
    for (auto& x : c.w) x = read_commitment(r);
    for (auto& x : c.w_prime) x = read_commitment(r);
    c.position = read_commitment(r);
    return c;
}

void write_pairs(ByteWriter& w, const std::vector<PairCommitments>& cs) {
    w.u32(static_cast<std::uint32_t>(cs.size()));
    for (const auto& c : cs) write_pair(w, c);
}

std::vector<PairCommitments> read_pairs(ByteReader& r) {
    auto n = r.u32();
    if (n > consistency::kMaxCopies) throw FramingError("too many copies");
    std::vector<PairCommitments> out;
    for (std::uint32_t i = 0; i < n; ++i) out.push_back(read_pair(r));
    return out;
}

Bytes check_bytes(const CheckOpening& o) {
    ByteWriter w;
    for (const auto& x : o.w) commit::write(w, x);
    for (const auto& x : o.w_prime) commit::write(w, x);
    return w.take();
}

CheckOpening read_check(ByteReader& r) {
    CheckOpening o;
    for (auto& x : o.w) x = commit::read_opening(r);
    for (auto& x : o.w_prime) x = commit::read_opening(r);
    return o;
}

Bytes eval_bytes(const EvalOpening& o) {
    ByteWriter w;
    commit::write(w, o.position);
    commit::write(w, o.triple);
    return w.take();
}

EvalOpening read_eval(ByteReader& r) {
    EvalOpening o;
    o.position = commit::read_opening(r);
    o.triple = commit::read_opening(r);
    return o;
}

bool bit_set(std::uint64_t v, std::size_t j) { return (v >> j) & 1; }

// --- roles ---------------------------------------------------------------------------

enum class ComplaintKind : std::uint8_t { Membership = 0, Construction = 1, EvalOpening = 2 };

struct Complaint {
    ComplaintKind kind{};
    std::size_t provider = 0;
    std::size_t wire = 0;
    std::size_t copy = 0;
    Bytes evidence;
};

// A party's view of one provider input wire.
struct WireView {
    std::vector<PairCommitments> commitments;
    std::vector<Triple> triples;
    std::vector<EvalOpening> openings;
    bool broken = false;  // an evaluation opening failed
    LabelHashes hashes;
    bool swapped = false;
    HashTuple sent;
    std::optional<HashTuple> received;
    consistency::FinalWireLabels final;
};

struct PartyRole {
    int k = 1;
    RoleId id = kP1;
    Drbg rng;
    std::vector<std::vector<WireView>> wires;  // [provider][wire]
    std::vector<std::uint64_t> rho;
    std::vector<Complaint> complaints;
    garble::GarbledCircuit own;         // circuit k, garbler side
    garble::ProviderLabels evaluated;   // outputs of circuit 3 - k
    std::size_t failed_rows = 0;
    output::PartyOutput out;

    PartyRole(int party, Drbg r) : k(party), id(party == 1 ? kP1 : kP2), rng(std::move(r)) {}
    int other() const { return 3 - k; }
    RoleId other_id() const { return k == 1 ? kP2 : kP1; }
};

struct ProviderRole {
    std::size_t u = 0;
    RoleId id = 0;
    Bits x;
    Drbg rng;
    std::optional<consistency::ProviderMaterial> material;
    std::vector<std::uint64_t> rho;
    output::OutputCommitmentBundle bundle;
    std::array<Digest, 2> half_digests{};
    output::ProviderOpenings openings;
    std::optional<output::OutputFailureProof> proof;
    ProviderResult result;

    ProviderRole(std::size_t index, Bits input, Drbg r)
        : u(index), id(provider_role(index)), x(std::move(input)), rng(std::move(r)) {}
};

struct SessionAbort {
    Phase phase;
    AbortReason reason;
    RoleId detector;
    std::vector<RoleId> culprits;
    std::string detail;
};

// Checks every message against the route table and records it.
class Network {
public:
    Network(Transport& t, Transcript& tr, std::uint64_t sid) : t_(t), tr_(tr), sid_(sid) {}

    void set_phase(Phase p) { phase_ = p; }
    Phase phase() const { return phase_; }

    void send(RoleId from, RoleId to, MessageType type, Bytes payload) {
        if (!route_allowed(type, from, to, phase_))
            throw ProtocolError(std::string(to_string(type)) + " may not travel from " + role_name(from) + " to " +
                                role_name(to) + " in phase " + std::to_string(static_cast<int>(phase_)));
        auto framed = frame({type, sid_, std::move(payload)});
        tr_.record(phase_, from, to, framed, type);
        t_.send(from, to, std::move(framed));
    }

    Bytes recv(RoleId self, RoleId from, MessageType type) {
        Bytes framed;
        try {
            framed = t_.recv(self, from);
        } catch (const TransportError& e) {
            throw SessionAbort{phase_, AbortReason::Timeout, self, {from}, e.what()};
        }
        return open(framed, type, from);
    }

    std::optional<Bytes> poll(RoleId self, RoleId from, MessageType type) {
        t_.sync();
        auto f = t_.try_recv(self, from);
        if (!f) return std::nullopt;
        return open(*f, type, from);
    }

private:
    Bytes open(const Bytes& framed, MessageType type, RoleId from) {
        auto m = unframe(framed);
        if (m.session_id != sid_) throw ProtocolError("frame from " + role_name(from) + " carries another session id");
        if (m.type != type)
            throw ProtocolError("expected " + std::string(to_string(type)) + " from " + role_name(from) + ", got " +
                                std::string(to_string(m.type)));
        return std::move(m.payload);
    }

    Transport& t_;
    Transcript& tr_;
    std::uint64_t sid_;
    Phase phase_ = Phase::Input;
};

class Session {
public:
    Session(const CircuitHandle& c, const std::vector<Bits>& inputs, const SessionOptions& opt, Transport& t,
            SessionResult& result);
    void run();

private:
    template <class B>
    const B* adversary() const {
        return opt_.adversary ? std::get_if<B>(&opt_.adversary->behavior) : nullptr;
    }
    template <class B>
    const B* adversary_party(int k) const {
        auto a = adversary<B>();
        return a && a->party == k ? a : nullptr;
    }

    RoleId verifier() const { return provider_role(N_ - 1); }
    bool has_inputs(std::size_t u) const { return !circuit_.inputs[u].empty(); }
    std::size_t wire_count(std::size_t u) const { return circuit_.inputs[u].size(); }
    std::uint64_t rho_of(const std::vector<std::uint64_t>& rho, std::size_t u, std::size_t i) const {
        return rho[offset_[u] + i];
    }

    // phase 1
    void input_commitments();
    void commitment_digests();
    void coin_toss();
    void challenge();
    void openings();
    void hash_tuples();
    void reports();
    Verdict judge(const Complaint& c, int reporter);
    Verdict judge_proof(const Complaint& c, int reporter);
    Verdict judge_complaint(const Complaint& c, int reporter);
    void answer_request(PartyRole& p);

    // phase 2
    void compute();
    // phase 3
    void output_phase();

    void abort(const SessionAbort& a);

    const CircuitHandle& handle_;
    const circuit::Circuit& circuit_;
    const SessionOptions& opt_;
    Transport& transport_;
    SessionResult& result_;
    std::size_t N_;
    std::size_t s_;
    std::size_t L_ = 0;
    std::vector<std::size_t> offset_;
    std::uint64_t session_id_;
    Network net_;
    Drbg adversary_rng_;
    std::array<PartyRole, 2> parties_;
    std::vector<ProviderRole> providers_;
};

Drbg seeded(std::uint64_t seed) { return Drbg(seed); }

Session::Session(const CircuitHandle& c, const std::vector<Bits>& inputs, const SessionOptions& opt, Transport& t,
                 SessionResult& result)
    : handle_(c),
      circuit_(*c.circuit),
      opt_(opt),
      transport_(t),
      result_(result),
      N_(circuit_.provider_count()),
      s_(opt.s),
      session_id_(seeded(opt.seed).derive("session id").u64()),
      net_(t, result.transcript, session_id_),
      adversary_rng_(seeded(opt.seed).derive("adversary")),
      parties_{PartyRole(1, seeded(opt.seed).derive("P1")), PartyRole(2, seeded(opt.seed).derive("P2"))} {
    if (N_ < 2) throw InputShapeError("a session needs at least one data provider and the cloud provider");
    if (inputs.size() != N_) throw InputShapeError("one input vector per provider expected");
    if (has_inputs(N_ - 1)) throw InputShapeError("the last provider is the cloud provider and takes no input");
    if (s_ < consistency::kMinCopies || s_ > consistency::kMaxCopies)
        throw InputShapeError("copy count s must be in [2, 64]");
    for (std::size_t u = 0; u < N_; ++u) {
        if (inputs[u].size() != wire_count(u))
            throw InputShapeError("provider " + std::to_string(u) + " supplied the wrong number of input bits");
        offset_.push_back(L_);
        L_ += wire_count(u);
        providers_.emplace_back(u, inputs[u], seeded(opt.seed).derive("D" + std::to_string(u)));
    }
    for (auto& p : parties_) p.wires.resize(N_);
    result_.providers.assign(N_, {});
    result_.expected = circuit::eval_plain(circuit_, inputs);
}

void Session::run() {
    try {
        net_.set_phase(Phase::Input);
        input_commitments();
        commitment_digests();
        coin_toss();
        challenge();
        openings();
        hash_tuples();
        reports();
        net_.set_phase(Phase::Compute);
        compute();
        net_.set_phase(Phase::Output);
        output_phase();
    } catch (const SessionAbort& a) {
        abort(a);
    }
    transport_.reset();
}

// Detector tells everyone it may reach in this phase.
void Session::abort(const SessionAbort& a) {
    result_.abort_phase = a.phase;
    result_.reason = a.reason;
    result_.detail = a.detail;
    if (a.reason != AbortReason::Complaint) result_.verdicts.push_back({a.detail, a.culprits});
    for (auto& p : result_.providers)
        if (p.decision == Decision::Pending) p.reason = "aborted: " + a.detail;

    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(a.reason)).u32(static_cast<std::uint32_t>(a.culprits.size()));
    for (auto r : a.culprits) w.u16(static_cast<std::uint16_t>(r));
    w.blob(ByteView(reinterpret_cast<const std::uint8_t*>(a.detail.data()), a.detail.size()));
    Bytes payload = w.take();
    std::vector<RoleId> told;
    for (RoleId to = 0; to < static_cast<RoleId>(2 + N_); ++to) {
        if (to == a.detector || !route_allowed(MessageType::Abort, a.detector, to, a.phase)) continue;
        net_.set_phase(a.phase);
        net_.send(a.detector, to, MessageType::Abort, payload);
        told.push_back(to);
    }
    if (a.reason == AbortReason::Timeout) return;
    try {
        for (auto to : told) net_.recv(to, a.detector, MessageType::Abort);
    } catch (const SessionAbort&) {
        // A recipient that never sees the abort changes nothing about the verdict.
    }
}

// --- phase 1 -------------------------------------------------------------------------

void Session::input_commitments() {
    for (auto& d : providers_) {
        if (!has_inputs(d.u)) continue;
        std::optional<consistency::Inconsistency> deviation;
        if (auto a = adversary<InconsistentLabels>(); a && a->provider == d.u)
            deviation = consistency::Inconsistency{a->consistent_mask, a->wires};
        d.material = consistency::generate_input_material(d.x, s_, d.rng, deviation);
        ByteWriter w;
        w.u32(static_cast<std::uint32_t>(d.material->wires.size())).u32(static_cast<std::uint32_t>(s_));
        for (const auto& wire : d.material->wires)
            for (const auto& c : wire.commitments) write_pair(w, c);
        Bytes payload = w.take();
        net_.send(d.id, kP1, MessageType::InputCommitments, payload);
        net_.send(d.id, kP2, MessageType::InputCommitments, std::move(payload));
    }
    for (auto& p : parties_) {
        for (std::size_t u = 0; u < N_; ++u) {
            if (!has_inputs(u)) continue;
            auto payload = net_.recv(p.id, provider_role(u), MessageType::InputCommitments);
            ByteReader r(payload);
            auto wires = r.u32();
            auto copies = r.u32();
            if (wires != wire_count(u) || copies != s_)
                throw SessionAbort{Phase::Input, AbortReason::ShapeMismatch, p.id, {provider_role(u)},
                                   role_name(provider_role(u)) + " committed to the wrong number of wires or copies"};
            p.wires[u].resize(wires);
            for (auto& view : p.wires[u])
                for (std::size_t j = 0; j < s_; ++j) view.commitments.push_back(read_pair(r));
            r.expect_done();
        }
    }
}

void Session::commitment_digests() {
    auto digests = [&](const PartyRole& p) {
        std::vector<Digest> out(N_);
        for (std::size_t u = 0; u < N_; ++u) {
            if (!has_inputs(u)) continue;
            std::vector<std::vector<PairCommitments>> cs;
            for (const auto& view : p.wires[u]) cs.push_back(view.commitments);
            out[u] = consistency::commitments_digest(cs);
        }
        return out;
    };
    std::array<std::vector<Digest>, 2> mine{digests(parties_[0]), digests(parties_[1])};
    for (auto& p : parties_) {
        ByteWriter w;
        std::uint32_t count = 0;
        for (std::size_t u = 0; u < N_; ++u) count += has_inputs(u);
        w.u32(count);
        for (std::size_t u = 0; u < N_; ++u)
            if (has_inputs(u)) w.u32(static_cast<std::uint32_t>(u)).raw(mine[p.k - 1][u]);
        net_.send(p.id, p.other_id(), MessageType::CommitmentDigest, w.take());
    }
    for (auto& p : parties_) {
        auto payload = net_.recv(p.id, p.other_id(), MessageType::CommitmentDigest);
        ByteReader r(payload);
        auto count = r.u32();
        for (std::uint32_t n = 0; n < count; ++n) {
            auto u = r.u32();
            auto d = r.fixed<32>();
            if (u >= N_ || !has_inputs(u) || d != mine[p.k - 1][u])
                throw SessionAbort{Phase::Input, AbortReason::CommitmentMismatch, p.id, {},
                                   "the parties hold different input commitments from " +
                                       (u < N_ ? role_name(provider_role(u)) : std::string("an unknown provider"))};
        }
        r.expect_done();
    }
}

void Session::coin_toss() {
    const std::uint64_t full = consistency::copies_mask(s_);
    std::vector<std::size_t> pending(L_);
    for (std::size_t g = 0; g < L_; ++g) pending[g] = g;
    for (auto& p : parties_) p.rho.assign(L_, 0);

    for (std::size_t round = 0; !pending.empty(); ++round) {
        if (round == kMaxCoinRounds) throw ProtocolError("coin toss did not settle");
        std::array<std::vector<std::uint64_t>, 2> masks;
        std::array<consistency::CoinShare, 2> shares;
        for (auto& p : parties_) {
            auto& m = masks[p.k - 1];
            for (std::size_t n = 0; n < pending.size(); ++n) m.push_back(p.rng.u64() & full);
            shares[p.k - 1] = consistency::commit_coin(m, p.rng);
        }
        for (auto& p : parties_) {
            ByteWriter w;
            write_commitment(w, shares[p.k - 1].commitment);
            net_.send(p.id, p.other_id(), MessageType::CoinCommit, w.take());
        }
        std::array<Commitment, 2> theirs;
        for (auto& p : parties_) {
            auto payload = net_.recv(p.id, p.other_id(), MessageType::CoinCommit);
            ByteReader r(payload);
            theirs[p.k - 1] = read_commitment(r);
            r.expect_done();
        }

        // P1 reveals first; P2 checks it before revealing.
        std::array<std::vector<std::uint64_t>, 2> opened;
        for (auto& p : parties_) {
            Opening reveal = shares[p.k - 1].opening;
            if (adversary_party<BiasCoinToss>(p.k)) {
                // Aim every pending string at a check set of copy 0 alone.
                auto alt = masks[p.k - 1];
                for (std::size_t n = 0; n < alt.size(); ++n)
                    alt[n] = p.k == 2 ? (1 ^ opened[1][n]) & full : alt[n] ^ 1;
                if (alt == masks[p.k - 1]) alt[0] ^= 1;
                reveal = consistency::commit_coin(alt, adversary_rng_).opening;
            }
            ByteWriter w;
            commit::write(w, reveal);
            net_.send(p.id, p.other_id(), MessageType::CoinReveal, w.take());

            auto& receiver = parties_[2 - p.k];
            auto payload = net_.recv(receiver.id, p.id, MessageType::CoinReveal);
            ByteReader r(payload);
            auto o = commit::read_opening(r);
            r.expect_done();
            try {
                opened[receiver.k - 1] = consistency::open_coin(theirs[receiver.k - 1], o, p.k, pending.size(), s_);
            } catch (const CoinTossCheatError& e) {
                throw SessionAbort{Phase::Input, AbortReason::CoinTossCheat, receiver.id, {p.id}, e.what()};
            }
        }

        std::vector<std::size_t> next;
        for (auto& p : parties_) {
            const auto& own = masks[p.k - 1];
            const auto& other = opened[p.k - 1];
            for (std::size_t n = 0; n < pending.size(); ++n) p.rho[pending[n]] = (own[n] ^ other[n]) & full;
        }
        for (auto g : pending)
            if (!consistency::valid_challenge(parties_[0].rho[g], s_)) next.push_back(g);
        pending = std::move(next);
    }
}

void Session::challenge() {
    for (auto& p : parties_) {
        ByteWriter w;
        w.u32(static_cast<std::uint32_t>(L_));
        for (auto v : p.rho) w.u64(v);
        Bytes payload = w.take();
        for (auto& d : providers_) net_.send(p.id, d.id, MessageType::Challenge, payload);
    }
    for (auto& d : providers_) {
        std::array<std::vector<std::uint64_t>, 2> got;
        for (auto& p : parties_) {
            auto payload = net_.recv(d.id, p.id, MessageType::Challenge);
            ByteReader r(payload);
            auto n = r.u32();
            if (n != L_)
                throw SessionAbort{Phase::Input, AbortReason::ChallengeMismatch, d.id, {p.id},
                                   role_name(p.id) + " sent a challenge of the wrong length"};
            for (std::uint32_t g = 0; g < n; ++g) got[p.k - 1].push_back(r.u64());
            r.expect_done();
        }
        if (got[0] != got[1])
            throw SessionAbort{Phase::Input, AbortReason::ChallengeMismatch, d.id, {},
                               "P1 and P2 sent different challenge strings"};
        for (auto v : got[0])
            if (!consistency::valid_challenge(v, s_))
                throw SessionAbort{Phase::Input, AbortReason::ChallengeMismatch, d.id, {},
                                   "challenge string selects no check or no evaluation copy"};
        d.rho = std::move(got[0]);
    }
}

void Session::openings() {
    for (auto& d : providers_) {
        if (!has_inputs(d.u)) continue;
        const auto& m = *d.material;
        for (auto& p : parties_) {
            ByteWriter check, eval;
            for (std::size_t i = 0; i < m.wires.size(); ++i) {
                auto rho = rho_of(d.rho, d.u, i);
                for (std::size_t j = 0; j < s_; ++j) {
                    if (bit_set(rho, j))
                        check.raw(check_bytes(consistency::check_opening(m.wires[i], j)));
                    else
                        eval.raw(eval_bytes(consistency::eval_opening(m.wires[i], j, p.k)));
                }
            }
            net_.send(d.id, p.id, MessageType::CheckSetOpenings, check.take());
            net_.send(d.id, p.id, MessageType::EvalSetOpenings, eval.take());
        }
    }

    for (auto& p : parties_) {
        for (std::size_t u = 0; u < N_; ++u) {
            if (!has_inputs(u)) continue;
            auto check = net_.recv(p.id, provider_role(u), MessageType::CheckSetOpenings);
            auto eval = net_.recv(p.id, provider_role(u), MessageType::EvalSetOpenings);
            ByteReader rc(check), re(eval);
            for (std::size_t i = 0; i < wire_count(u); ++i) {
                auto& view = p.wires[u][i];
                auto rho = rho_of(p.rho, u, i);
                for (std::size_t j = 0; j < s_; ++j) {
                    if (bit_set(rho, j)) {
                        auto o = read_check(rc);
                        bool bad = false;
                        try {
                            bad = consistency::check_construction(view.commitments[j], o, u, i, j).has_value();
                        } catch (const OpeningError&) {
                            bad = true;
                        }
                        if (bad) p.complaints.push_back({ComplaintKind::Construction, u, i, j, check_bytes(o)});
                    } else {
                        auto o = read_eval(re);
                        try {
                            view.triples.push_back(consistency::open_eval(view.commitments[j], o, p.k));
                            view.openings.push_back(o);
                        } catch (const OpeningError&) {
                            view.broken = true;
                            p.complaints.push_back({ComplaintKind::EvalOpening, u, i, j, eval_bytes(o)});
                        }
                    }
                }
            }
            rc.expect_done();
            re.expect_done();
        }
        if (auto a = adversary_party<FalsifyCheckFailure>(p.k); a && a->construction) {
            // Complain about the first check copy using the provider's honest openings.
            auto rho = rho_of(p.rho, a->provider, a->wire);
            std::size_t j = 0;
            while (!bit_set(rho, j)) ++j;
            const auto& m = *providers_[a->provider].material;
            p.complaints.push_back({ComplaintKind::Construction, a->provider, a->wire, j,
                                    check_bytes(consistency::check_opening(m.wires[a->wire], j))});
        }
    }
}

void Session::hash_tuples() {
    for (auto& p : parties_) {
        auto forge = adversary_party<ForgeConsistencyProof>(p.k);
        ByteWriter w;
        w.u32(static_cast<std::uint32_t>(L_));
        for (std::size_t u = 0; u < N_; ++u) {
            for (std::size_t i = 0; i < wire_count(u); ++i) {
                auto& view = p.wires[u][i];
                if (view.broken) {
                    w.u8(0);
                    continue;
                }
                view.hashes = consistency::hash_triples(view.triples, p.rng);
                if (forge && forge->variant == 1 && forge->provider == u && forge->wire == i) {
                    auto fake = view.triples;
                    fake[0].cross = adversary_rng_.label();
                    auto h = consistency::hash_triples(fake, adversary_rng_);
                    view.hashes.h[2] = h.h[2];
                    view.hashes.c[2] = h.c[2];
                }
                view.swapped = p.rng.bit();
                view.sent = consistency::make_hash_tuple(view.hashes, view.swapped);
                w.u8(1);
                view.sent.write(w);
            }
        }
        net_.send(p.id, p.other_id(), MessageType::HashTuple, w.take());
    }

    for (auto& p : parties_) {
        auto payload = net_.recv(p.id, p.other_id(), MessageType::HashTuple);
        ByteReader r(payload);
        if (r.u32() != L_)
            throw SessionAbort{Phase::Input, AbortReason::ShapeMismatch, p.id, {p.other_id()},
                               role_name(p.other_id()) + " sent hash tuples for the wrong number of wires"};
        for (std::size_t u = 0; u < N_; ++u)
            for (std::size_t i = 0; i < wire_count(u); ++i)
                if (r.u8()) p.wires[u][i].received = HashTuple::read(r);
        r.expect_done();

        auto falsify = adversary_party<FalsifyCheckFailure>(p.k);
        auto forge = adversary_party<ForgeConsistencyProof>(p.k);
        for (std::size_t u = 0; u < N_; ++u) {
            for (std::size_t i = 0; i < wire_count(u); ++i) {
                auto& view = p.wires[u][i];
                if (view.broken || !view.received) continue;
                auto proof = [&] {
                    return consistency::make_proof(u, i, p.k, *view.received, view.hashes, view.openings);
                };
                auto file = [&](const consistency::ConsistencyProof& pr) {
                    p.complaints.push_back({ComplaintKind::Membership, u, i, 0, pr.serialize()});
                };
                bool targeted = false;
                if (forge && forge->provider == u && forge->wire == i && forge->variant != 1) {
                    targeted = true;
                    auto pr = proof();
                    if (forge->variant == 0) {
                        pr.accused.h[0][0] ^= 1;
                    } else {
                        // Swap in a different cross-label list after the exchange.
                        auto fake = view.triples;
                        fake.back().cross = adversary_rng_.label();
                        auto h = consistency::hash_triples(fake, adversary_rng_);
                        view.hashes.h[2] = h.h[2];
                        view.hashes.c[2] = h.c[2];
                        pr.h3 = h.h[2];
                        pr.c3 = h.c[2].commitment;
                    }
                    file(pr);
                } else if (falsify && !falsify->construction && falsify->provider == u && falsify->wire == i) {
                    targeted = true;
                    file(proof());
                }
                if (!targeted && !consistency::membership(view.hashes, *view.received)) file(proof());
            }
        }
    }
}

void Session::reports() {
    for (auto& p : parties_) {
        ByteWriter w;
        w.u32(static_cast<std::uint32_t>(p.complaints.size()));
        for (const auto& c : p.complaints) {
            w.u8(static_cast<std::uint8_t>(c.kind)).u32(static_cast<std::uint32_t>(c.provider));
            w.u32(static_cast<std::uint32_t>(c.wire)).u32(static_cast<std::uint32_t>(c.copy));
            w.blob(c.evidence);
        }
        Bytes payload = w.take();
        for (auto& d : providers_) net_.send(p.id, d.id, MessageType::Phase1Report, payload);
    }

    std::array<std::vector<Complaint>, 2> filed;
    for (auto& d : providers_) {
        for (auto& p : parties_) {
            auto payload = net_.recv(d.id, p.id, MessageType::Phase1Report);
            if (d.id != verifier()) continue;
            ByteReader r(payload);
            auto n = r.u32();
            for (std::uint32_t c = 0; c < n; ++c) {
                Complaint cp;
                auto kind = r.u8();
                if (kind > 2) throw ProtocolError("unknown complaint kind");
                cp.kind = static_cast<ComplaintKind>(kind);
                cp.provider = r.u32();
                cp.wire = r.u32();
                cp.copy = r.u32();
                cp.evidence = r.blob();
                filed[p.k - 1].push_back(std::move(cp));
            }
            r.expect_done();
        }
    }
    if (filed[0].empty() && filed[1].empty()) return;

    // Every complaint is judged before aborting.
    std::set<std::pair<std::string, std::vector<RoleId>>> seen;
    std::set<RoleId> culprits;
    for (int k = 1; k <= 2; ++k) {
        for (const auto& c : filed[k - 1]) {
            auto v = judge(c, k);
            culprits.insert(v.culprits.begin(), v.culprits.end());
            if (seen.insert({v.what, v.culprits}).second) result_.verdicts.push_back(std::move(v));
        }
    }
    std::string detail = "phase-1 complaints judged by " + role_name(verifier());
    throw SessionAbort{Phase::Input, AbortReason::Complaint, verifier(), {culprits.begin(), culprits.end()}, detail};
}

Verdict Session::judge(const Complaint& c, int reporter) {
    RoleId accuser = reporter == 1 ? kP1 : kP2;
    if (c.provider >= N_ - 1 || !has_inputs(c.provider) || c.wire >= wire_count(c.provider))
        return {role_name(accuser) + " complained about a wire that does not exist", {accuser}};
    return c.kind == ComplaintKind::Membership ? judge_proof(c, reporter) : judge_complaint(c, reporter);
}

Verdict Session::judge_proof(const Complaint& c, int reporter) {
    const RoleId v = verifier();
    RoleId accuser = reporter == 1 ? kP1 : kP2;
    RoleId other = reporter == 1 ? kP2 : kP1;
    consistency::ConsistencyProof proof;
    try {
        proof = consistency::ConsistencyProof::parse(c.evidence);
    } catch (const FramingError&) {
        return {role_name(accuser) + " filed a malformed consistency proof", {accuser}};
    }
    if (proof.provider != c.provider || proof.wire != c.wire || proof.accuser != reporter)
        return {role_name(accuser) + " filed a proof whose header disagrees with its complaint", {accuser}};

    ByteWriter req;
    req.u8(0).u32(static_cast<std::uint32_t>(c.provider)).u32(static_cast<std::uint32_t>(c.wire)).u8(static_cast<std::uint8_t>(reporter));
    Bytes request = req.take();
    net_.send(v, accuser, MessageType::ProofOpeningRequest, request);
    net_.send(v, other, MessageType::ProofOpeningRequest, request);
    answer_request(parties_[reporter - 1]);
    answer_request(parties_[2 - reporter]);

    consistency::ProofEvidence ev;
    auto a = net_.recv(v, accuser, MessageType::ProofOpeningResponse);
    auto o = net_.recv(v, other, MessageType::ProofOpeningResponse);
    try {
        ByteReader ra(a);
        if (ra.u8() != 0) throw FramingError("accuser answered in the wrong role");
        ev.accuser_list = commit::read_opening(ra);
        ra.expect_done();
    } catch (const FramingError&) {
        return {role_name(accuser) + " answered the proof request with a malformed opening", {accuser}};
    }
    try {
        ByteReader ro(o);
        if (ro.u8() != 1) throw FramingError("other party answered in the wrong role");
        ev.accused_tuple = HashTuple::read(ro);
        ev.accuser_c3 = read_commitment(ro);
        for (auto& x : ev.accused_lists) x = commit::read_opening(ro);
        ev.provider_commitments = read_pairs(ro);
        ro.expect_done();
    } catch (const FramingError&) {
        return {role_name(other) + " answered the proof request with malformed evidence", {other}};
    }
    ev.rho = rho_of(providers_[N_ - 1].rho, c.provider, c.wire);
    ev.copies = s_;

    auto check = consistency::verify_consistency_proof(proof, ev);
    const std::string where = role_name(provider_role(c.provider)) + " wire " + std::to_string(c.wire);
    switch (check.verdict) {
    case consistency::ProofVerdict::CheatingProvider:
        return {"inconsistent input labels from " + where, {provider_role(c.provider)}};
    case consistency::ProofVerdict::CheatingParty: {
        RoleId culprit = check.party == 1 ? kP1 : kP2;
        return {role_name(culprit) + " cheated in a consistency proof on " + where + ": " + check.reason, {culprit}};
    }
    case consistency::ProofVerdict::ProofInvalid:
        break;
    }
    return {role_name(accuser) + " filed a consistency proof that shows no inconsistency on " + where, {accuser}};
}

Verdict Session::judge_complaint(const Complaint& c, int reporter) {
    const RoleId v = verifier();
    RoleId accuser = reporter == 1 ? kP1 : kP2;
    RoleId other = reporter == 1 ? kP2 : kP1;
    RoleId provider = provider_role(c.provider);
    const std::string where = role_name(provider) + " wire " + std::to_string(c.wire) + " copy " + std::to_string(c.copy);

    ByteWriter req;
    req.u8(1).u32(static_cast<std::uint32_t>(c.provider)).u32(static_cast<std::uint32_t>(c.wire)).u8(static_cast<std::uint8_t>(reporter));
    net_.send(v, other, MessageType::ProofOpeningRequest, req.take());
    answer_request(parties_[2 - reporter]);
    auto payload = net_.recv(v, other, MessageType::ProofOpeningResponse);
    std::vector<PairCommitments> commitments;
    try {
        ByteReader r(payload);
        if (r.u8() != 1) throw FramingError("other party answered in the wrong role");
        commitments = read_pairs(r);
        r.expect_done();
    } catch (const FramingError&) {
        return {role_name(other) + " answered the complaint request with malformed evidence", {other}};
    }
    if (commitments.size() != s_ || c.copy >= s_)
        return {"complaint about " + where + " does not match the committed copies", {accuser}};

    auto rho = rho_of(providers_[N_ - 1].rho, c.provider, c.wire);
    bool is_check = bit_set(rho, c.copy);
    try {
        ByteReader r(c.evidence);
        if (c.kind == ComplaintKind::Construction) {
            if (!is_check) return {role_name(accuser) + " complained about an evaluation copy as a check copy", {accuser}};
            auto o = read_check(r);
            r.expect_done();
            if (consistency::check_construction(commitments[c.copy], o, c.provider, c.wire, c.copy))
                return {"malformed input commitments from " + where, {provider}};
            return {role_name(accuser) + " complained about a well-formed check copy on " + where, {accuser}};
        }
        if (is_check) return {role_name(accuser) + " complained about a check copy as an evaluation copy", {accuser}};
        auto o = read_eval(r);
        r.expect_done();
        consistency::open_eval(commitments[c.copy], o, reporter);
        return {role_name(accuser) + " complained about a valid evaluation opening on " + where, {accuser}};
    } catch (const FramingError&) {
        return {role_name(accuser) + " filed malformed complaint evidence", {accuser}};
    } catch (const OpeningError&) {
        // Either the provider sent a bad opening or the reporter altered it.
        return {"opening for " + where + " does not match its commitment; " + role_name(provider) + " or " +
                    role_name(accuser) + " is at fault",
                {}};
    }
}

void Session::answer_request(PartyRole& p) {
    auto payload = net_.recv(p.id, verifier(), MessageType::ProofOpeningRequest);
    ByteReader r(payload);
    auto kind = r.u8();
    std::size_t u = r.u32();
    std::size_t i = r.u32();
    int accuser = r.u8();
    r.expect_done();
    if (u >= N_ || i >= p.wires[u].size() || (accuser != 1 && accuser != 2))
        throw ProtocolError("proof request names an unknown wire");
    const auto& view = p.wires[u][i];
    ByteWriter w;
    if (accuser == p.k) {
        w.u8(0);
        commit::write(w, view.hashes.c[2].opening);
    } else {
        w.u8(1);
        if (kind == 0) {
            HashTuple empty;
            (view.broken ? empty : view.sent).write(w);
            write_commitment(w, view.received ? view.received->c3 : Commitment{});
            int a = view.swapped ? 1 : 0;
            commit::write(w, view.hashes.c[a].opening);
            commit::write(w, view.hashes.c[1 - a].opening);
        }
        write_pairs(w, view.commitments);
    }
    net_.send(p.id, verifier(), MessageType::ProofOpeningResponse, w.take());
}

// --- phase 2 -------------------------------------------------------------------------

void Session::compute() {
    std::array<garble::ProviderEncodings, 2> own_inputs;
    std::array<garble::ProviderLabels, 2> cross_inputs;
    for (auto& p : parties_) {
        auto& enc = own_inputs[p.k - 1];
        auto& lab = cross_inputs[p.k - 1];
        enc.resize(N_);
        lab.resize(N_);
        for (std::size_t u = 0; u < N_; ++u) {
            for (auto& view : p.wires[u]) {
                view.final = consistency::evaluate_final_labels(view.triples);
                enc[u].push_back(view.final.own);
                lab[u].push_back(view.final.cross);
            }
        }
    }

    // The two garbled circuits are independent; build them concurrently.
    std::array<std::future<garble::GarbledCircuit>, 2> built;
    for (auto& p : parties_)
        built[p.k - 1] = std::async(std::launch::async, [&, k = p.k] {
            return garble::garble(handle_.circuit, own_inputs[k - 1], parties_[k - 1].rng, &handle_.digest);
        });
    for (auto& p : parties_) p.own = built[p.k - 1].get();

    for (auto& p : parties_) {
        garble::GarbledTables tables = p.own.tables;
        if (auto a = adversary_party<TamperGarbledGate>(p.k)) tables.tamper_gate(circuit_, a->gate, a->mask);
        net_.send(p.id, p.other_id(), MessageType::GarbledCircuit, tables.serialize());
    }

    std::size_t row_bytes = 0;
    for (const auto& g : circuit_.gates) row_bytes += garble::row_count(g.kind) * garble::kRowBytes;
    std::array<garble::GarbledTables, 2> received;
    for (auto& p : parties_) {
        auto payload = net_.recv(p.id, p.other_id(), MessageType::GarbledCircuit);
        auto reject = [&](const std::string& why) {
            return SessionAbort{Phase::Compute, AbortReason::MalformedGarbledCircuit, p.id, {p.other_id()},
                                role_name(p.other_id()) + " sent a garbled circuit that " + why};
        };
        try {
            received[p.k - 1] = garble::GarbledTables::parse(payload);
        } catch (const FramingError& e) {
            throw reject(std::string("does not parse: ") + e.what());
        }
        const auto& t = received[p.k - 1];
        if (t.circuit_digest != handle_.digest) throw reject("is for another circuit");
        if (t.gate_count != circuit_.gates.size() || t.select_hints.size() != circuit_.input_wire_count() ||
            t.rows.size() != row_bytes)
            throw reject("has the wrong shape");
    }

    std::array<std::future<garble::LenientEvaluation>, 2> evaluated;
    for (auto& p : parties_)
        evaluated[p.k - 1] = std::async(std::launch::async, [&, k = p.k] {
            return garble::evaluate_lenient(circuit_, received[k - 1], cross_inputs[k - 1]);
        });
    for (auto& p : parties_) {
        auto e = evaluated[p.k - 1].get();
        p.evaluated = std::move(e.outputs);
        p.failed_rows = e.failed_rows;
        result_.failed_rows[p.k - 1] = e.failed_rows;
    }

    // A party must never hold an output label of its own circuit next to
    // that circuit's output encoding.
    for (const auto& p : parties_)
        for (std::size_t u = 0; u < N_; ++u)
            for (std::size_t w = 0; w < p.evaluated[u].size(); ++w) {
                const auto& e = p.own.output_encodings[u][w];
                if (p.evaluated[u][w] == e.zero || p.evaluated[u][w] == e.one) result_.role_secrecy = false;
            }
}

// --- phase 3 -------------------------------------------------------------------------

void Session::output_phase() {
    for (auto& p : parties_) {
        auto enc = p.own.output_encodings;
        auto labels = p.evaluated;
        if (auto a = adversary_party<SubstituteOutputLabel>(p.k)) {
            if (a->swap_encoding)
                std::swap(enc[a->provider][a->wire].zero, enc[a->provider][a->wire].one);
            else
                labels[a->provider][a->wire] = adversary_rng_.label();
        }
        p.out = output::publish_output_commitments(p.k, enc, labels, p.rng);
        ByteWriter w;
        w.u32(static_cast<std::uint32_t>(N_));
        for (std::size_t u = 0; u < N_; ++u) {
            write_commitment(w, p.out.encodings[u].commitment);
            write_commitment(w, p.out.labels[u].commitment);
        }
        Bytes payload = w.take();
        for (auto& d : providers_) net_.send(p.id, d.id, MessageType::OutputCommitments, payload);
    }

    for (auto& d : providers_) {
        d.bundle.providers.assign(N_, {});
        for (auto& p : parties_) {
            auto payload = net_.recv(d.id, p.id, MessageType::OutputCommitments);
            ByteReader r(payload);
            if (r.u32() != N_)
                throw SessionAbort{Phase::Output, AbortReason::ShapeMismatch, d.id, {p.id},
                                   role_name(p.id) + " committed outputs for the wrong number of providers"};
            ByteWriter half;
            for (std::size_t u = 0; u < N_; ++u) {
                auto e = read_commitment(r);
                auto l = read_commitment(r);
                half.raw(e.digest).raw(l.digest);
                if (p.k == 1) {
                    d.bundle.providers[u].e1 = e;
                    d.bundle.providers[u].o2 = l;
                } else {
                    d.bundle.providers[u].e2 = e;
                    d.bundle.providers[u].o1 = l;
                }
            }
            r.expect_done();
            d.half_digests[p.k - 1] = sha256(half.bytes());
        }
    }

    // Providers agree on the bundle so that failure proofs can be checked.
    const RoleId v = verifier();
    for (auto& d : providers_) {
        if (d.id == v) continue;
        ByteWriter w;
        w.raw(d.half_digests[0]).raw(d.half_digests[1]);
        net_.send(d.id, v, MessageType::BundleDigest, w.take());
    }
    auto& cloud = providers_[N_ - 1];
    for (auto& d : providers_) {
        if (d.id == v) continue;
        auto payload = net_.recv(v, d.id, MessageType::BundleDigest);
        ByteReader r(payload);
        std::array<Digest, 2> theirs{r.fixed<32>(), r.fixed<32>()};
        r.expect_done();
        for (int k = 0; k < 2; ++k)
            if (theirs[k] != cloud.half_digests[k]) {
                RoleId party = k == 0 ? kP1 : kP2;
                throw SessionAbort{Phase::Output, AbortReason::BundleMismatch, v, {party},
                                   role_name(party) + " sent different output commitments to " + role_name(d.id) +
                                       " and " + role_name(v)};
            }
    }

    for (auto& p : parties_) {
        for (std::size_t u = 0; u < N_; ++u) {
            ByteWriter w;
            commit::write(w, p.out.encodings[u].opening);
            commit::write(w, p.out.labels[u].opening);
            net_.send(p.id, provider_role(u), MessageType::OutputOpenings, w.take());
        }
    }

    for (auto& d : providers_) {
        for (auto& p : parties_) {
            auto payload = net_.recv(d.id, p.id, MessageType::OutputOpenings);
            ByteReader r(payload);
            auto e = commit::read_opening(r);
            auto l = commit::read_opening(r);
            r.expect_done();
            if (p.k == 1) {
                d.openings.e1 = std::move(e);
                d.openings.o2 = std::move(l);
            } else {
                d.openings.e2 = std::move(e);
                d.openings.o1 = std::move(l);
            }
        }
        auto& res = d.result;
        try {
            auto verdict = output::verify_output(d.u, d.bundle, d.openings, circuit_.outputs[d.u].size());
            if (verdict.accepted) {
                res.decision = Decision::Accept;
                res.y = verdict.y;
            } else {
                res.decision = Decision::Reject;
                res.reason = verdict.reason;
                d.proof = verdict.proof;
            }
        } catch (const OpeningError& e) {
            res.decision = Decision::Reject;
            res.reason = e.what();
            RoleId culprit = e.party() == "P1" ? kP1 : kP2;
            result_.verdicts.push_back({role_name(d.id) + " received an output opening that does not match: " +
                                            std::string(e.what()),
                                        {culprit}});
        }
        if (auto a = adversary<FalseOutputComplaint>(); a && a->provider == d.u && !d.proof)
            d.proof = output::OutputFailureProof{d.u, d.openings};
        result_.providers[d.u] = res;
    }

    for (auto& d : providers_) {
        if (!d.proof) continue;
        Bytes payload = d.proof->serialize();
        for (auto& other : providers_)
            if (other.id != d.id) net_.send(d.id, other.id, MessageType::FailureProof, payload);
    }
    for (auto& judge : providers_) {
        for (auto& sender : providers_) {
            if (sender.id == judge.id) continue;
            auto payload = net_.poll(judge.id, sender.id, MessageType::FailureProof);
            if (!payload) continue;
            auto status = output::ProofStatus::Spurious;
            try {
                auto proof = output::OutputFailureProof::parse(*payload);
                if (proof.provider == sender.u)
                    status = output::verify_failure_proof(proof, judge.bundle, circuit_.outputs[sender.u].size());
            } catch (const FramingError&) {
            }
            // The verifier's judgement is the one recorded; the cloud's own
            // proof is recorded as judged by provider 0.
            bool recorder = judge.id == v || (sender.id == v && judge.u == 0);
            if (!recorder) continue;
            result_.failure_proofs.push_back({sender.u, status});
            if (status == output::ProofStatus::Confirmed)
                result_.verdicts.push_back({"output verification failed for " + role_name(sender.id) +
                                                "; the two circuits disagree or do not decode",
                                            {}});
            else
                result_.verdicts.push_back({role_name(sender.id) + " sent a spurious failure proof", {sender.id}});
        }
    }
}

} // namespace

// --- adversaries ---------------------------------------------------------------------

RoleId AdversaryScript::target() const {
    return std::visit(
        [](const auto& b) -> RoleId {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, InconsistentLabels> || std::is_same_v<B, FalseOutputComplaint>)
                return provider_role(b.provider);
            else
                return b.party == 1 ? kP1 : kP2;
        },
        behavior);
}

std::string AdversaryScript::name() const { return adversary_names().at(behavior.index()); }

const std::vector<std::string>& adversary_names() {
    static const std::vector<std::string> names{"inconsistent-labels", "tamper-gate",  "substitute-output",
                                                "bias-coin",           "falsify-check", "forge-proof",
                                                "false-complaint"};
    return names;
}

std::vector<bool> providers_depending_on(const circuit::Circuit& c, std::size_t gate) {
    if (gate >= c.gates.size()) throw InputShapeError("gate index out of range");
    std::vector<bool> dep(c.wire_count, false);
    dep[c.gates[gate].out] = true;
    for (std::size_t g = gate + 1; g < c.gates.size(); ++g) {
        const auto& x = c.gates[g];
        if (dep[x.in0] || dep[x.in1]) dep[x.out] = true;
    }
    std::vector<bool> out(c.provider_count(), false);
    for (std::size_t u = 0; u < c.provider_count(); ++u)
        for (auto w : c.outputs[u]) out[u] = out[u] || dep[w];
    return out;
}

AdversaryScript make_adversary(const std::string& name, const circuit::Circuit& c, std::size_t s, Drbg& rng,
                               std::optional<std::size_t> preferred_provider) {
    std::vector<std::size_t> with_inputs;
    for (std::size_t u = 0; u < c.provider_count(); ++u)
        if (!c.inputs[u].empty()) with_inputs.push_back(u);
    if (with_inputs.empty()) throw InputShapeError("circuit has no provider inputs");
    auto input_provider = [&] {
        if (preferred_provider && *preferred_provider < c.provider_count() && !c.inputs[*preferred_provider].empty())
            return *preferred_provider;
        return with_inputs[rng.below(with_inputs.size())];
    };
    auto party = [&] { return 1 + static_cast<int>(rng.below(2)); };

    if (name == "inconsistent-labels") {
        InconsistentLabels b;
        b.provider = input_provider();
        do b.consistent_mask = rng.u64() & consistency::copies_mask(s);
        while (!consistency::valid_challenge(b.consistent_mask, s));
        b.wires = {static_cast<std::size_t>(rng.below(c.inputs[b.provider].size()))};
        return {b};
    }
    if (name == "tamper-gate") {
        if (c.gates.empty()) throw InputShapeError("circuit has no gates to tamper with");
        TamperGarbledGate b;
        b.party = party();
        for (;;) {
            b.gate = rng.below(c.gates.size());
            auto dep = providers_depending_on(c, b.gate);
            if (std::find(dep.begin(), dep.end(), true) != dep.end()) break;
        }
        rng.fill(b.mask.data(), b.mask.size());
        b.mask[0] |= 1;
        return {b};
    }
    if (name == "substitute-output") {
        SubstituteOutputLabel b;
        b.party = party();
        do b.provider = rng.below(c.provider_count());
        while (c.outputs[b.provider].empty());
        if (preferred_provider && *preferred_provider < c.provider_count() && !c.outputs[*preferred_provider].empty())
            b.provider = *preferred_provider;
        b.wire = rng.below(c.outputs[b.provider].size());
        b.swap_encoding = rng.bit();
        return {b};
    }
    if (name == "bias-coin") return {BiasCoinToss{party()}};
    if (name == "falsify-check" || name == "forge-proof") {
        int k = party();
        auto u = input_provider();
        auto w = static_cast<std::size_t>(rng.below(c.inputs[u].size()));
        if (name == "falsify-check") return {FalsifyCheckFailure{k, u, w, rng.bit()}};
        return {ForgeConsistencyProof{k, u, w, static_cast<int>(rng.below(3))}};
    }
    if (name == "false-complaint") {
        FalseOutputComplaint b;
        b.provider = preferred_provider && *preferred_provider < c.provider_count() ? *preferred_provider
                                                                                   : rng.below(c.provider_count());
        return {b};
    }
    throw UsageError("unknown adversary '" + name + "'");
}

// --- results ---------------------------------------------------------------------------

std::string_view to_string(AbortReason r) {
    switch (r) {
    case AbortReason::None: return "none";
    case AbortReason::Timeout: return "timeout";
    case AbortReason::ShapeMismatch: return "shape-mismatch";
    case AbortReason::CommitmentMismatch: return "commitment-mismatch";
    case AbortReason::CoinTossCheat: return "coin-toss-cheat";
    case AbortReason::ChallengeMismatch: return "challenge-mismatch";
    case AbortReason::Complaint: return "complaint";
    case AbortReason::MalformedGarbledCircuit: return "malformed-garbled-circuit";
    case AbortReason::BundleMismatch: return "bundle-mismatch";
    }
    return "unknown";
}

bool SessionResult::all_accept() const {
    return !aborted() && std::all_of(providers.begin(), providers.end(),
                                     [](const ProviderResult& p) { return p.decision == Decision::Accept; });
}

bool SessionResult::any_reject() const {
    return std::any_of(providers.begin(), providers.end(),
                       [](const ProviderResult& p) { return p.decision == Decision::Reject; });
}

bool SessionResult::detected() const { return aborted() || any_reject() || !identified().empty(); }

std::vector<RoleId> SessionResult::identified() const {
    std::set<RoleId> out;
    for (const auto& v : verdicts) out.insert(v.culprits.begin(), v.culprits.end());
    return {out.begin(), out.end()};
}

std::size_t SessionResult::silent_wrong_acceptances() const {
    std::size_t n = 0;
    for (std::size_t u = 0; u < providers.size(); ++u)
        if (providers[u].decision == Decision::Accept && u < expected.size() && providers[u].y != expected[u]) ++n;
    return n;
}

Assessment assess(const AdversaryScript& script, const circuit::Circuit& c, const SessionResult& r) {
    Assessment a;
    a.detected = r.detected();
    a.input_phase = r.abort_phase == Phase::Input;
    a.silent_wrong = r.silent_wrong_acceptances();
    const RoleId target = script.target();
    const auto ids = r.identified();
    const bool only_target = std::all_of(ids.begin(), ids.end(), [&](RoleId x) { return x == target; });
    const bool names_target = std::find(ids.begin(), ids.end(), target) != ids.end();
    auto decision = [&](std::size_t u) { return r.providers.at(u).decision; };

    a.verdict_correct = std::visit(
        [&](const auto& b) -> bool {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, InconsistentLabels>) {
                return only_target && (!a.input_phase || names_target);
            } else if constexpr (std::is_same_v<B, TamperGarbledGate>) {
                if (!ids.empty() || r.aborted()) return false;
                bool label_touched = std::any_of(b.mask.begin(), b.mask.begin() + 16, [](auto x) { return x != 0; });
                auto dep = providers_depending_on(c, b.gate);
                for (std::size_t u = 0; u < dep.size(); ++u) {
                    auto want = dep[u] && label_touched ? Decision::Reject : Decision::Accept;
                    if (decision(u) != want) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<B, SubstituteOutputLabel>) {
                if (!ids.empty() || r.aborted()) return false;
                for (std::size_t u = 0; u < r.providers.size(); ++u)
                    if (decision(u) != (u == b.provider ? Decision::Reject : Decision::Accept)) return false;
                return true;
            } else if constexpr (std::is_same_v<B, FalseOutputComplaint>) {
                if (!names_target || !only_target || r.aborted()) return false;
                for (std::size_t u = 0; u < r.providers.size(); ++u)
                    if (u != b.provider && decision(u) != Decision::Accept) return false;
                return true;
            } else {
                return a.input_phase && names_target && only_target;
            }
        },
        script.behavior);
    return a;
}

// --- running ---------------------------------------------------------------------------

CircuitHandle make_handle(circuit::Circuit c) {
    CircuitHandle h;
    h.digest = circuit::circuit_digest(c);
    h.circuit = std::make_shared<const circuit::Circuit>(std::move(c));
    return h;
}

SessionResult run_protocol(const CircuitHandle& c, const std::vector<Bits>& inputs, const SessionOptions& opt) {
    if (!c.circuit) throw InputShapeError("no circuit");
    InProcessTransport local;
    Transport& t = opt.transport ? *opt.transport : local;
    SessionResult result;
    Session session(c, inputs, opt, t, result);
    session.run();
    return result;
}

AuctionSessionResult run_session(const auction::AuctionConfig& cfg, const CircuitHandle& c,
                                 const std::vector<auction::Bid>& bids, const SessionOptions& opt) {
    AuctionSessionResult out;
    out.oracle = auction::oracle_run_lenient(cfg, bids);
    out.session = run_protocol(c, auction::encode_inputs(cfg, bids), opt);
    const auto n = bids.size();
    const auto& providers = out.session.providers;
    if (providers.size() != n + 1) throw InputShapeError("circuit does not match the bidder count");
    if (providers[n].decision == Decision::Accept) out.outcome = auction::decode_cloud_output(cfg, n, providers[n].y);

    auto wd = auction::derive_widths(cfg, n);
    bool ok = out.session.all_accept() && out.outcome && *out.outcome == out.oracle;
    for (std::size_t j = 0; ok && j < n; ++j) {
        auto [x, pay] = auction::decode_bidder_output(wd, providers[j].y);
        ok = x == out.oracle.allocation[j] && pay == out.oracle.payment_raw[j];
    }
    out.matches_oracle = ok;
    return out;
}

AuctionSessionResult run_session(const auction::AuctionConfig& cfg, const std::vector<auction::Bid>& bids,
                                 std::size_t s, const std::optional<AdversaryScript>& adversary,
                                 std::uint64_t seed) {
    auto handle = make_handle(auction::build_auction_circuit(cfg, bids.size()));
    SessionOptions opt;
    opt.s = s;
    opt.seed = seed;
    opt.adversary = adversary;
    return run_session(cfg, handle, bids, opt);
}

} // namespace dualgc::session
