#pragma once

// Three-phase protocol between two computation parties (P1, P2) and the data
// providers, driven message by message over a Transport.
//
// Provider N-1 of the circuit is the input-less cloud provider. It also acts
// as the designated verifier of phase-1 complaints.
//
// Payload layouts (big-endian; "commitment" is 32 bytes, "opening" is a u32
// length-prefixed message followed by a 16-byte nonce):
//   INPUT_COMMITMENTS      u32 wires, u32 copies, then per wire and copy
//                          W1 W2 W'1 W'2 position commitments
//   COMMITMENT_DIGEST      u32 count, then per input provider u32 u, digest
//   COIN_COMMIT            commitment
//   COIN_REVEAL            opening
//   CHALLENGE              u32 wires, u64 rho per wire (all providers)
//   CHECKSET_OPENINGS      per wire, per check copy ascending: 4 openings
//   EVALSET_OPENINGS       per wire, per evaluation copy ascending:
//                          position opening, triple opening
//   HASH_TUPLE             u32 count, then per input wire: u8 present,
//                          and if present H~1 H~2 C~1 C~2 C3
//   PHASE1_REPORT          u32 count, then per complaint: u8 kind, u32 provider,
//                          u32 wire, u32 copy, blob evidence
//   PROOF_OPENING_REQUEST  u8 kind, u32 provider, u32 wire, u8 accuser
//   PROOF_OPENING_RESPONSE u8 role (0 accuser, 1 other), then
//                          accuser: opening of C3
//                          other (proof): tuple, accuser C3, 2 openings,
//                                         u32 copies, commitments per copy
//                          other (complaint): u32 copies, commitments per copy
//   GARBLED_CIRCUIT        garbled tables
//   OUTPUT_COMMITMENTS     u32 providers, then per provider two commitments
//                          (P1: E1, O2; P2: E2, O1)
//   BUNDLE_DIGEST          digest of P1's half, digest of P2's half
//   OUTPUT_OPENINGS        two openings in the order above
//   FAILURE_PROOF          output failure proof
//   ABORT                  u8 reason, u32 culprit count, u16 roles, blob detail

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dualgc/auction.hpp"
#include "dualgc/circuit.hpp"
#include "dualgc/garble.hpp"
#include "dualgc/output_verification.hpp"
#include "dualgc/messages.hpp"
#include "dualgc/transport.hpp"

namespace dualgc::session {

// --- adversary behaviours -------------------------------------------------------

// Provider submits labels that agree only on the copies in consistent_mask.
struct InconsistentLabels {
    std::size_t provider = 0;
    std::uint64_t consistent_mask = 0;
    std::vector<std::size_t> wires;
};

// Garbler XORs a mask into every row of one gate before sending.
struct TamperGarbledGate {
    int party = 1;
    std::size_t gate = 0;
    std::array<std::uint8_t, garble::kRowBytes> mask{};
};

// Party corrupts what it commits for one output wire of one provider: either
// the label it evaluated (replaced by a random one) or, as garbler, the order
// of the encoding.
struct SubstituteOutputLabel {
    int party = 1;
    std::size_t provider = 0;
    std::size_t wire = 0;
    bool swap_encoding = false;
};

// Party reveals a coin share other than the one it committed to.
struct BiasCoinToss {
    int party = 1;
};

// Party complains about a check that passed.
struct FalsifyCheckFailure {
    int party = 1;
    std::size_t provider = 0;
    std::size_t wire = 0;
    bool construction = false;  // construction complaint instead of a membership proof
};

// Party accuses an honest provider with a doctored consistency proof.
//   variant 0: altered H~ values in the quoted tuple
//   variant 1: fabricated cross-label list, committed from the start
//   variant 2: cross-label commitment replaced after the hash exchange
struct ForgeConsistencyProof {
    int party = 1;
    std::size_t provider = 0;
    std::size_t wire = 0;
    int variant = 0;
};

// Provider that verified its output complains anyway.
struct FalseOutputComplaint {
    std::size_t provider = 0;
};

using Behavior = std::variant<InconsistentLabels, TamperGarbledGate, SubstituteOutputLabel, BiasCoinToss,
                              FalsifyCheckFailure, ForgeConsistencyProof, FalseOutputComplaint>;

struct AdversaryScript {
    Behavior behavior;

    RoleId target() const;
    std::string name() const;
};

const std::vector<std::string>& adversary_names();

// Draws parameters for the named behaviour against `c`. Targets provider
// `preferred_provider` when it has input wires. Throws UsageError for an
// unknown name.
AdversaryScript make_adversary(const std::string& name, const circuit::Circuit& c, std::size_t s, Drbg& rng,
                               std::optional<std::size_t> preferred_provider = std::nullopt);

// Providers whose outputs depend on gate `gate`.
std::vector<bool> providers_depending_on(const circuit::Circuit& c, std::size_t gate);

// --- results ----------------------------------------------------------------------

enum class AbortReason : std::uint8_t {
    None = 0,
    Timeout,
    ShapeMismatch,
    CommitmentMismatch,
    CoinTossCheat,
    ChallengeMismatch,
    Complaint,
    MalformedGarbledCircuit,
    BundleMismatch,
};
std::string_view to_string(AbortReason r);

enum class Decision { Pending, Accept, Reject };

struct ProviderResult {
    Decision decision = Decision::Pending;
    Bits y;
    std::string reason;
};

// How another provider judged a FAILURE_PROOF.
struct ProofJudgement {
    std::size_t provider = 0;
    output::ProofStatus status = output::ProofStatus::Spurious;
};

struct Verdict {
    std::string what;
    std::vector<RoleId> culprits;  // empty when the evidence cannot attribute blame
};

struct SessionResult {
    std::optional<Phase> abort_phase;
    AbortReason reason = AbortReason::None;
    std::string detail;
    std::vector<Verdict> verdicts;
    std::vector<ProviderResult> providers;
    std::vector<ProofJudgement> failure_proofs;
    std::vector<Bits> expected;  // plain evaluation on the true inputs
    std::array<std::size_t, 2> failed_rows{};  // per evaluating party
    bool role_secrecy = true;
    Transcript transcript;

    bool aborted() const { return abort_phase.has_value(); }
    bool all_accept() const;
    bool any_reject() const;
    bool detected() const;
    // Roles named by any verdict.
    std::vector<RoleId> identified() const;
    // Providers that accepted an output different from the plain evaluation.
    std::size_t silent_wrong_acceptances() const;
};

// How an adversarial run went.
//   detected:        aborted, some provider rejected, or someone was named
//   input_phase:     aborted during phase 1
//   verdict_correct: no honest role was blamed, and the behaviour's
//                    expected consequence happened (its author named, or the
//                    affected providers rejecting where blame is unattributable)
struct Assessment {
    bool detected = false;
    bool input_phase = false;
    bool verdict_correct = false;
    std::size_t silent_wrong = 0;
};
Assessment assess(const AdversaryScript& script, const circuit::Circuit& c, const SessionResult& r);

// --- running ---------------------------------------------------------------------

struct CircuitHandle {
    std::shared_ptr<const circuit::Circuit> circuit;
    Digest digest{};
};
CircuitHandle make_handle(circuit::Circuit c);

struct SessionOptions {
    std::size_t s = 10;
    std::uint64_t seed = 0;
    std::optional<AdversaryScript> adversary;
    Transport* transport = nullptr;  // in-process when null
};

// inputs[u] holds provider u's bits; the last provider must have none.
SessionResult run_protocol(const CircuitHandle& c, const std::vector<Bits>& inputs, const SessionOptions& opt);

struct AuctionSessionResult {
    SessionResult session;
    auction::AuctionOutcome oracle;
    // From the cloud provider's accepted output.
    std::optional<auction::AuctionOutcome> outcome;
    // Every accepting provider's decoded output agrees with the oracle.
    bool matches_oracle = false;
};

AuctionSessionResult run_session(const auction::AuctionConfig& cfg, const CircuitHandle& c,
                                 const std::vector<auction::Bid>& bids, const SessionOptions& opt);
AuctionSessionResult run_session(const auction::AuctionConfig& cfg, const std::vector<auction::Bid>& bids,
                                 std::size_t s, const std::optional<AdversaryScript>& adversary,
                                 std::uint64_t seed);

} // namespace dualgc::session
