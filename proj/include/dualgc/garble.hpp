#pragma once

// Garbling and evaluation with externally supplied input encodings.
//
// Row encryption: for input labels (Ka, Kb) of gate g, the row at index
// r = 2*sel(Ka) + sel(Kb) holds
//     SHA-256(Ka || Kb || g || r)[0..18)  XOR  (output label || 0x0000)
// NOT gates use SHA-256(Ka || g || r) and have two rows indexed by sel(Ka).
// g is a 4-byte big-endian gate index and r a single byte. The two zero
// bytes authenticate the row for the evaluator.
//
// Select bits: internal wires use the label's least significant bit, with the
// garbler choosing the two labels of every internal wire to disagree there.
// Input-wire labels come from the data providers and carry no such guarantee,
// so the garbled circuit publishes for every input wire the index t of the
// first bit where SHA-256(K0) and SHA-256(K1) differ; sel(K) is bit t of
// SHA-256(K).

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "dualgc/bytes.hpp"
#include "dualgc/circuit.hpp"
#include "dualgc/crypto.hpp"

namespace dualgc::garble {

inline constexpr std::size_t kRowBytes = 18;
inline constexpr std::size_t kAuthBytes = 2;

using ProviderEncodings = std::vector<std::vector<Encoding>>;
using ProviderLabels = std::vector<std::vector<Label>>;

std::size_t row_count(circuit::GateKind kind);

// What the garbler sends to the evaluator.
//
// Wire format (big-endian):
//   circuit digest   32 bytes
//   gate count       u32
//   input wires      u32
//   select hints     1 byte per input wire, provider order
//   rows             18 bytes each, gate order, 4 per gate (2 per NOT)
struct GarbledTables {
    Digest circuit_digest{};
    std::uint32_t gate_count = 0;
    std::vector<std::uint8_t> select_hints;
    Bytes rows;

    Bytes serialize() const;
    static GarbledTables parse(ByteView bytes);
    std::size_t byte_size() const { return 32 + 4 + 4 + select_hints.size() + rows.size(); }

    // Fault injection: XORs `mask` into every row of gate `gate` of `c`.
    void tamper_gate(const circuit::Circuit& c, std::size_t gate, const std::array<std::uint8_t, kRowBytes>& mask);
    std::uint8_t* row(std::size_t offset) { return rows.data() + offset * kRowBytes; }
};

// Garbler-side view. Encodings never leave the garbler.
struct GarbledCircuit {
    std::shared_ptr<const circuit::Circuit> base;
    GarbledTables tables;
    ProviderEncodings input_encodings;
    ProviderEncodings output_encodings;
};

// Input encodings come from the data providers: one per input wire, same
// shape as base->inputs. Internal wires draw fresh labels from `rng`.
// Throws EncodingCoverageError if any input wire lacks a valid encoding.
GarbledCircuit garble(std::shared_ptr<const circuit::Circuit> base, const ProviderEncodings& input_encodings,
                      Drbg& rng, const Digest* digest = nullptr);

// Gate-by-gate evaluation. Throws EvaluationError when a row fails to
// authenticate under the labels presented.
ProviderLabels evaluate(const circuit::Circuit& c, const GarbledTables& tables, const ProviderLabels& input_labels);

// Same walk, but a row that fails to authenticate yields its garbage
// plaintext and evaluation continues. Used where aborting would leak which
// row was reached.
struct LenientEvaluation {
    ProviderLabels outputs;
    std::size_t failed_rows = 0;
};
LenientEvaluation evaluate_lenient(const circuit::Circuit& c, const GarbledTables& tables,
                                   const ProviderLabels& input_labels);

// bit i = 0 if labels[i] is encodings[i].zero, 1 if it is .one.
// Throws DecodeError for a label matching neither or a degenerate encoding.
Bits decode(std::span<const Label> labels, std::span<const Encoding> encodings);

// Labels selecting `bits` from `encodings`.
std::vector<Label> select_labels(std::span<const Encoding> encodings, const Bits& bits);

} // namespace dualgc::garble
