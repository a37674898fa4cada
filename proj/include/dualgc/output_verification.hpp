#pragma once

// Output commitments and per-provider verification.
//
// Garbler k holds the output encodings E_k of its circuit; as evaluator of
// the other circuit it holds output labels O_(3-k). For each provider u,
// P1 commits to E_1,u and O_2,u and P2 commits to E_2,u and O_1,u:
//   E_k,u = for each output wire: zero-label || one-label     (tag 0x04)
//   O_k,u = for each output wire: the evaluated label        (tag 0x05)
// Provider u receives all four openings, decodes both results and accepts
// only if they agree.

#include <optional>
#include <vector>

#include "dualgc/bytes.hpp"
#include "dualgc/commit.hpp"
#include "dualgc/crypto.hpp"

namespace dualgc::output {

struct ProviderEntry {
    commit::Commitment e1;
    commit::Commitment o2;
    commit::Commitment e2;
    commit::Commitment o1;
    friend bool operator==(const ProviderEntry&, const ProviderEntry&) = default;
};

struct OutputCommitmentBundle {
    std::vector<ProviderEntry> providers;

    std::size_t commitment_count() const { return 4 * providers.size(); }
    Bytes serialize() const;
    static OutputCommitmentBundle parse(ByteView bytes);
    Digest digest() const { return sha256(serialize()); }
    friend bool operator==(const OutputCommitmentBundle&, const OutputCommitmentBundle&) = default;
};

// One party's half of the bundle, with the openings it retains.
struct PartyOutput {
    int party = 1;
    std::vector<commit::Committed> encodings;  // E_k,u
    std::vector<commit::Committed> labels;     // O_(3-k),u
};

// Throws ProtocolError if any output encoding is degenerate or the shapes differ.
PartyOutput publish_output_commitments(int party, const std::vector<std::vector<Encoding>>& own_encodings,
                                       const std::vector<std::vector<Label>>& evaluated_labels, Drbg& rng);

// Throws ProtocolError unless p1 is party 1 and p2 party 2 with matching shapes.
OutputCommitmentBundle make_bundle(const PartyOutput& p1, const PartyOutput& p2);

struct ProviderOpenings {
    commit::Opening e1;
    commit::Opening o1;
    commit::Opening e2;
    commit::Opening o2;

    void write(ByteWriter& w) const;
    static ProviderOpenings read(ByteReader& r);
};

// Private openings for provider u assembled from both parties' halves.
// In a session each party sends only its own two.
ProviderOpenings openings_for(std::size_t u, const PartyOutput& p1, const PartyOutput& p2);

struct OutputFailureProof {
    std::size_t provider = 0;
    ProviderOpenings openings;

    Bytes serialize() const;
    static OutputFailureProof parse(ByteView bytes);
};

struct OutputVerdict {
    bool accepted = false;
    Bits y;
    std::optional<OutputFailureProof> proof;
    std::string reason;
};

// Throws OpeningError naming "P1" or "P2" when an opening does not verify.
OutputVerdict verify_output(std::size_t u, const OutputCommitmentBundle& bundle, const ProviderOpenings& openings,
                            std::size_t output_bits);

enum class ProofStatus { Confirmed, Spurious };

ProofStatus verify_failure_proof(const OutputFailureProof& proof, const OutputCommitmentBundle& bundle,
                                 std::size_t output_bits);

std::vector<Encoding> parse_encodings(ByteView payload);
std::vector<Label> parse_labels(ByteView payload);

} // namespace dualgc::output
