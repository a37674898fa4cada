#pragma once

// Boolean circuit netlist over the gate basis {AND, OR, XOR, NOT}.
//
// Wires are dense indices. Each provider owns an ordered list of input wires
// and an ordered list of output wires; multi-bit numbers are big-endian in
// those lists (most significant bit first).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dualgc/bytes.hpp"
#include "dualgc/crypto.hpp"

namespace dualgc::circuit {

using WireId = std::uint32_t;

enum class GateKind : std::uint8_t { And = 0, Or = 1, Xor = 2, Not = 3 };

const char* to_string(GateKind kind);
bool apply(GateKind kind, bool a, bool b);

struct Gate {
    GateKind kind;
    WireId in0;
    WireId in1; // equal to in0 for NOT
    WireId out;

    bool unary() const { return kind == GateKind::Not; }
    friend bool operator==(const Gate&, const Gate&) = default;
};

struct Circuit {
    std::uint32_t wire_count = 0;
    std::vector<Gate> gates;
    std::vector<std::vector<WireId>> inputs;  // per provider
    std::vector<std::vector<WireId>> outputs; // per provider

    std::size_t provider_count() const { return inputs.size(); }
    std::size_t input_wire_count() const;
    // All input wires, provider by provider.
    std::vector<WireId> flat_inputs() const;

    friend bool operator==(const Circuit&, const Circuit&) = default;
};

// Checks arity, single assignment, topological order, disjoint inputs and
// output existence. Throws CircuitFormatError naming the first violation.
void validate(const Circuit& c);

// Plain evaluation. `inputs[u]` must have exactly inputs[u].size() bits.
std::vector<Bits> eval_plain(const Circuit& c, const std::vector<Bits>& inputs);

// Line-oriented netlist:
//   wires <count>
//   gates <count>
//   providers <count>
//   input <u> <w...>
//   output <u> <w...>
//   AND a b out | OR a b out | XOR a b out | NOT a out
std::string to_netlist(const Circuit& c);
Circuit from_netlist(const std::string& text);

// SHA-256 of the netlist text; identifies the circuit on the wire.
Digest circuit_digest(const Circuit& c);

} // namespace dualgc::circuit
