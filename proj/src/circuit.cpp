#include "dualgc/circuit.hpp"

#include <sstream>

#include "dualgc/errors.hpp"

namespace dualgc::circuit {

const char* to_string(GateKind kind) {
    switch (kind) {
    case GateKind::And: return "AND";
    case GateKind::Or: return "OR";
    case GateKind::Xor: return "XOR";
    case GateKind::Not: return "NOT";
    }
    return "?";
}

bool apply(GateKind kind, bool a, bool b) {
    switch (kind) {
    case GateKind::And: return a && b;
    case GateKind::Or: return a || b;
    case GateKind::Xor: return a != b;
    case GateKind::Not: return !a;
    }
    return false;
}

std::size_t Circuit::input_wire_count() const {
    std::size_t n = 0;
    for (const auto& in : inputs) n += in.size();
    return n;
}

std::vector<WireId> Circuit::flat_inputs() const {
    std::vector<WireId> out;
    out.reserve(input_wire_count());
    for (const auto& in : inputs) out.insert(out.end(), in.begin(), in.end());
    return out;
}

void validate(const Circuit& c) {
    // 0 = undefined, 1 = input, 2 = gate output
    std::vector<std::uint8_t> defined(c.wire_count, 0);
    auto fail = [](const std::string& msg) { throw CircuitFormatError(msg); };

    if (c.outputs.size() != c.inputs.size()) fail("input and output maps cover different provider counts");
    for (std::size_t u = 0; u < c.inputs.size(); ++u) {
        for (auto w : c.inputs[u]) {
            if (w >= c.wire_count) fail("input wire " + std::to_string(w) + " out of range");
            if (defined[w]) fail("input wire " + std::to_string(w) + " listed twice");
            defined[w] = 1;
        }
    }
    for (std::size_t g = 0; g < c.gates.size(); ++g) {
        const auto& gate = c.gates[g];
        auto where = " at gate " + std::to_string(g);
        if (gate.out >= c.wire_count || gate.in0 >= c.wire_count || gate.in1 >= c.wire_count)
            fail("wire out of range" + where);
        if (gate.unary() && gate.in1 != gate.in0) fail("NOT gate with two inputs" + where);
        if (!defined[gate.in0] || !defined[gate.in1]) fail("gate reads an undefined wire" + where);
        if (defined[gate.out]) fail("wire " + std::to_string(gate.out) + " assigned twice" + where);
        defined[gate.out] = 2;
    }
    for (const auto& out : c.outputs)
        for (auto w : out)
            if (w >= c.wire_count || !defined[w]) fail("output wire " + std::to_string(w) + " is never defined");
}

std::vector<Bits> eval_plain(const Circuit& c, const std::vector<Bits>& inputs) {
    if (inputs.size() != c.inputs.size())
        throw InputShapeError("expected inputs for " + std::to_string(c.inputs.size()) + " providers, got " +
                              std::to_string(inputs.size()));
    std::vector<std::uint8_t> value(c.wire_count, 0);
    for (std::size_t u = 0; u < c.inputs.size(); ++u) {
        if (inputs[u].size() != c.inputs[u].size())
            throw InputShapeError("provider " + std::to_string(u) + ": expected " +
                                  std::to_string(c.inputs[u].size()) + " input bits, got " +
                                  std::to_string(inputs[u].size()));
        for (std::size_t i = 0; i < inputs[u].size(); ++i) value[c.inputs[u][i]] = inputs[u][i] & 1;
    }
    for (const auto& g : c.gates) value[g.out] = apply(g.kind, value[g.in0], value[g.in1]);

    std::vector<Bits> out(c.outputs.size());
    for (std::size_t u = 0; u < c.outputs.size(); ++u) {
        out[u].reserve(c.outputs[u].size());
        for (auto w : c.outputs[u]) out[u].push_back(value[w]);
    }
    return out;
}

std::string to_netlist(const Circuit& c) {
    std::ostringstream os;
    os << "wires " << c.wire_count << '\n' << "gates " << c.gates.size() << '\n';
    os << "providers " << c.inputs.size() << '\n';
    auto list = [&os](const char* tag, std::size_t u, const std::vector<WireId>& wires) {
        os << tag << ' ' << u;
        for (auto w : wires) os << ' ' << w;
        os << '\n';
    };
    for (std::size_t u = 0; u < c.inputs.size(); ++u) list("input", u, c.inputs[u]);
    for (std::size_t u = 0; u < c.outputs.size(); ++u) list("output", u, c.outputs[u]);
    for (const auto& g : c.gates) {
        os << to_string(g.kind) << ' ' << g.in0;
        if (!g.unary()) os << ' ' << g.in1;
        os << ' ' << g.out << '\n';
    }
    return os.str();
}

Circuit from_netlist(const std::string& text) {
    Circuit c;
    std::istringstream is(text);
    std::string line;
    std::size_t declared_gates = 0;
    bool have_wires = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        auto read_list = [&](std::vector<std::vector<WireId>>& target) {
            std::size_t u;
            if (!(ls >> u) || u >= target.size()) throw CircuitFormatError("bad provider index: " + line);
            WireId w;
            while (ls >> w) target[u].push_back(w);
        };
        if (head == "wires") {
            ls >> c.wire_count;
            have_wires = true;
        } else if (head == "gates") {
            ls >> declared_gates;
            c.gates.reserve(declared_gates);
        } else if (head == "providers") {
            std::size_t n = 0;
            ls >> n;
            c.inputs.assign(n, {});
            c.outputs.assign(n, {});
        } else if (head == "input") {
            read_list(c.inputs);
        } else if (head == "output") {
            read_list(c.outputs);
        } else {
            Gate g{};
            if (head == "AND") g.kind = GateKind::And;
            else if (head == "OR") g.kind = GateKind::Or;
            else if (head == "XOR") g.kind = GateKind::Xor;
            else if (head == "NOT") g.kind = GateKind::Not;
            else throw CircuitFormatError("unknown netlist line: " + line);
            if (g.kind == GateKind::Not) {
                if (!(ls >> g.in0 >> g.out)) throw CircuitFormatError("malformed gate: " + line);
                g.in1 = g.in0;
            } else if (!(ls >> g.in0 >> g.in1 >> g.out)) {
                throw CircuitFormatError("malformed gate: " + line);
            }
            c.gates.push_back(g);
        }
        if (ls.fail() && !ls.eof()) throw CircuitFormatError("malformed line: " + line);
    }
    if (!have_wires) throw CircuitFormatError("missing wire count");
    if (c.gates.size() != declared_gates) throw CircuitFormatError("gate count does not match header");
    validate(c);
    return c;
}

Digest circuit_digest(const Circuit& c) {
    auto text = to_netlist(c);
    return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

} // namespace dualgc::circuit
