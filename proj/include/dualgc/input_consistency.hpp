#pragma once

// Input submission with cut-and-choose consistency checking.
//
// For every input wire i and copy j a provider draws two encodings
// E1 = (K1_0, K1_1) for circuit 1, E2 = (K2_0, K2_1) for circuit 2 and a bit b,
// and commits to two sets of two triples:
//   W  = { E1 || K2_b,     E2 || K1_b }
//   W' = { E1 || K2_(1-b), E2 || K1_(1-b) }
// plus a position bit p = b XOR x. p = 0 marks W as the input set, p = 1
// marks W'. Either way the cross labels of the input set encode x.
//
// Committed layouts (after the one-byte context tag):
//   triple    K || K || K      48 bytes
//   position  p                1 byte
//   hash list H(K_j) ...       32 bytes per evaluation copy, ascending j
//   coin      u32 count, then one u64 mask per wire

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dualgc/bytes.hpp"
#include "dualgc/commit.hpp"
#include "dualgc/crypto.hpp"

namespace dualgc::consistency {

inline constexpr std::size_t kMinCopies = 2;
inline constexpr std::size_t kMaxCopies = 64;

struct Triple {
    Label first;
    Label second;
    Label cross;

    Bytes serialize() const;
    static Triple parse(ByteView bytes);
    Encoding encoding() const { return {first, second}; }
    friend bool operator==(const Triple&, const Triple&) = default;
};

// Public half of one copy: what P1 and P2 receive up front.
struct PairCommitments {
    std::array<commit::Commitment, 2> w;
    std::array<commit::Commitment, 2> w_prime;
    commit::Commitment position;
};

// Provider-retained openings of one copy.
struct PairOpenings {
    std::array<commit::Opening, 2> w;
    std::array<commit::Opening, 2> w_prime;
    commit::Opening position;
};

// Provider secrets of one copy, kept for tests and adversary bookkeeping.
struct CopySecret {
    Encoding circuit1;
    Encoding circuit2;
    bool b = false;
};

struct WireMaterial {
    std::vector<CopySecret> copies;
    std::vector<PairCommitments> commitments;
    std::vector<PairOpenings> openings;
};

struct ProviderMaterial {
    std::size_t copies = 0;
    Bits input;
    std::vector<WireMaterial> wires;

    std::size_t commitment_count() const;
    std::vector<std::vector<PairCommitments>> public_commitments() const;
};

// Deviation from honest generation on a set of wires: on every copy whose bit
// is clear in `consistent_mask`, the second triple of the input set carries
// the circuit-1 label for 1 - x instead of x.
struct Inconsistency {
    std::uint64_t consistent_mask = 0;
    std::vector<std::size_t> wires;
};

ProviderMaterial generate_input_material(const Bits& x, std::size_t s, Drbg& rng,
                                         const std::optional<Inconsistency>& deviation = std::nullopt);

// Digest over every commitment of one provider, in wire/copy order. Parties
// compare these to detect a provider sending them different commitments.
Digest commitments_digest(const std::vector<std::vector<PairCommitments>>& wires);

// --- coin toss -------------------------------------------------------------

std::uint64_t copies_mask(std::size_t s);

struct CoinShare {
    commit::Commitment commitment;
    commit::Opening opening;
};

CoinShare commit_coin(const std::vector<std::uint64_t>& masks, Drbg& rng);

// Opens a revealed share. Throws CoinTossCheatError(party) if the reveal
// does not match the commitment or is malformed.
std::vector<std::uint64_t> open_coin(const commit::Commitment& c, const commit::Opening& o, int party,
                                     std::size_t wires, std::size_t s);

// rho = rho1 XOR rho2 restricted to s bits. Entries that come out all-zero or
// all-one must be re-tossed; `retoss` lists their indices.
struct ChallengeString {
    std::vector<std::uint64_t> rho;
    std::vector<std::size_t> retoss;
};
ChallengeString coin_toss(const CoinShare& p1, const CoinShare& p2, std::size_t wires, std::size_t s);

bool valid_challenge(std::uint64_t rho, std::size_t s);
// Evaluation copies (rho bit clear), ascending.
std::vector<std::size_t> evaluation_copies(std::uint64_t rho, std::size_t s);

// --- commitment construction check ------------------------------------------

struct CheckOpening {
    std::array<commit::Opening, 2> w;
    std::array<commit::Opening, 2> w_prime;
};

struct BadInput {
    std::size_t provider = 0;
    std::size_t wire = 0;
    std::optional<std::size_t> copy;
    std::string reason;
};

// Throws OpeningError("provider") if an opening does not match.
std::optional<BadInput> check_construction(const PairCommitments& c, const CheckOpening& o, std::size_t provider,
                                           std::size_t wire, std::size_t copy);

// --- evaluation copies --------------------------------------------------------

// What the provider opens of an evaluation copy to party k (1 or 2): the
// position bit and the k-th triple of the input set.
struct EvalOpening {
    commit::Opening position;
    commit::Opening triple;
};

EvalOpening eval_opening(const WireMaterial& m, std::size_t copy, int party);
CheckOpening check_opening(const WireMaterial& m, std::size_t copy);

// Verifies an evaluation opening for party k and returns its triple.
// Throws OpeningError("provider") on mismatch.
Triple open_eval(const PairCommitments& c, const EvalOpening& o, int party);

// --- label consistency --------------------------------------------------------

struct LabelHashes {
    // Index q - 1: first, second and cross label positions.
    std::array<Digest, 3> h{};
    std::array<commit::Committed, 3> c;
};

LabelHashes hash_triples(const std::vector<Triple>& triples, Drbg& rng);

// Sent to the other party: (H~1, H~2) and (C~1, C~2) in an order known only
// to the sender, plus the sender's own cross-label commitment C3.
struct HashTuple {
    std::array<Digest, 2> h{};
    std::array<commit::Commitment, 2> c;
    commit::Commitment c3;

    void write(ByteWriter& w) const;
    static HashTuple read(ByteReader& r);
    friend bool operator==(const HashTuple&, const HashTuple&) = default;
};

HashTuple make_hash_tuple(const LabelHashes& mine, bool swap);

bool membership(const LabelHashes& mine, const HashTuple& theirs);

// Built by the party whose membership test failed.
struct ConsistencyProof {
    std::size_t provider = 0;
    std::size_t wire = 0;
    int accuser = 1;
    HashTuple accused;  // the other party's tuple as received
    Digest h3{};
    commit::Commitment c3;
    // The provider's openings of the accuser's evaluation triples, ascending
    // copy order. They bind the accuser's hash list to what the provider sent.
    std::vector<EvalOpening> provider_openings;

    Bytes serialize() const;
    static ConsistencyProof parse(ByteView bytes);
};

ConsistencyProof make_proof(std::size_t provider, std::size_t wire, int accuser, const HashTuple& accused,
                            const LabelHashes& mine, std::vector<EvalOpening> provider_openings);

enum class ProofVerdict { CheatingProvider, CheatingParty, ProofInvalid };

struct ProofCheck {
    ProofVerdict verdict = ProofVerdict::ProofInvalid;
    int party = 0;  // for CheatingParty: 1 or 2
    std::string reason;
};

// What the verifier collects before judging a proof:
//   from the non-accuser: its HASH_TUPLE as sent, the accuser's C3 as
//     received, openings of its C~1, C~2 and the provider's commitments for
//     the wire;
//   from the accuser: the opening of its C3.
struct ProofEvidence {
    HashTuple accused_tuple;
    commit::Commitment accuser_c3;
    std::array<commit::Opening, 2> accused_lists;
    commit::Opening accuser_list;
    std::vector<PairCommitments> provider_commitments;
    std::uint64_t rho = 0;
    std::size_t copies = 0;
};

ProofCheck verify_consistency_proof(const ConsistencyProof& proof, const ProofEvidence& evidence);

// --- final labels ---------------------------------------------------------------

struct FinalWireLabels {
    Encoding own;  // for the circuit this party garbles
    Label cross;   // input label for the circuit this party evaluates
};

FinalWireLabels evaluate_final_labels(const std::vector<Triple>& triples);

// --- detection analysis ----------------------------------------------------------

// Number of valid challenge strings for which the deviation with the given
// consistent-copy pattern passes both checks, found by running the checks.
struct Exposure {
    std::size_t undetected = 0;
    std::size_t challenges = 0;
    double rate() const { return challenges ? static_cast<double>(undetected) / challenges : 0.0; }
};
Exposure exposure(std::uint64_t consistent_mask, std::size_t s, Drbg& rng);

// Runs generation, both checks and the membership tests for one wire under a
// fixed challenge. True when the deviation goes unnoticed.
bool undetected(std::uint64_t consistent_mask, std::uint64_t rho, std::size_t s, Drbg& rng);

} // namespace dualgc::consistency
