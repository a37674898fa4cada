#include "dualgc/garble.hpp"

#include <cstring>

#include <openssl/sha.h>

#include "dualgc/errors.hpp"

namespace dualgc::garble {

using circuit::Circuit;
using circuit::GateKind;

namespace {

using Pad = std::array<std::uint8_t, SHA256_DIGEST_LENGTH>;

Pad row_pad(const Label& a, const Label* b, std::uint32_t gate, std::uint8_t row) {
    std::array<std::uint8_t, 16 + 16 + 4 + 1> buf{};
    std::size_t n = 0;
    std::memcpy(buf.data(), a.bytes.data(), 16);
    n += 16;
    if (b) {
        std::memcpy(buf.data() + n, b->bytes.data(), 16);
        n += 16;
    }
    buf[n++] = static_cast<std::uint8_t>(gate >> 24);
    buf[n++] = static_cast<std::uint8_t>(gate >> 16);
    buf[n++] = static_cast<std::uint8_t>(gate >> 8);
    buf[n++] = static_cast<std::uint8_t>(gate);
    buf[n++] = row;
    Pad pad;
    SHA256(buf.data(), n, pad.data());
    return pad;
}

bool hashed_bit(const Label& k, std::uint8_t t) {
    Pad h;
    SHA256(k.bytes.data(), 16, h.data());
    return (h[t / 8] >> (7 - t % 8)) & 1;
}

// First bit index at which the hashes of the two labels differ.
std::uint8_t select_hint(const Encoding& e) {
    Pad h0, h1;
    SHA256(e.zero.bytes.data(), 16, h0.data());
    SHA256(e.one.bytes.data(), 16, h1.data());
    for (std::size_t t = 0; t < 256; ++t) {
        bool b0 = (h0[t / 8] >> (7 - t % 8)) & 1;
        bool b1 = (h1[t / 8] >> (7 - t % 8)) & 1;
        if (b0 != b1) return static_cast<std::uint8_t>(t);
    }
    throw EncodingCoverageError("input encoding labels hash identically");
}

std::size_t total_rows(const Circuit& c) {
    std::size_t n = 0;
    for (const auto& g : c.gates) n += row_count(g.kind);
    return n;
}

} // namespace

std::size_t row_count(GateKind kind) { return kind == GateKind::Not ? 2 : 4; }

Bytes GarbledTables::serialize() const {
    ByteWriter w;
    w.raw(circuit_digest).u32(gate_count).u32(static_cast<std::uint32_t>(select_hints.size()));
    w.raw(ByteView(select_hints));
    w.raw(ByteView(rows));
    return w.take();
}

GarbledTables GarbledTables::parse(ByteView bytes) {
    ByteReader r(bytes);
    GarbledTables t;
    t.circuit_digest = r.fixed<32>();
    t.gate_count = r.u32();
    auto inputs = r.u32();
    auto hints = r.raw(inputs);
    t.select_hints.assign(hints.begin(), hints.end());
    if (r.remaining() % kRowBytes != 0) throw FramingError("garbled rows are not a multiple of 18 bytes");
    auto rows = r.raw(r.remaining());
    t.rows.assign(rows.begin(), rows.end());
    return t;
}

void GarbledTables::tamper_gate(const Circuit& c, std::size_t gate,
                                const std::array<std::uint8_t, kRowBytes>& mask) {
    if (gate >= c.gates.size()) throw ProtocolError("tamper_gate: gate index out of range");
    std::size_t offset = 0;
    for (std::size_t g = 0; g < gate; ++g) offset += row_count(c.gates[g].kind);
    for (std::size_t r = 0; r < row_count(c.gates[gate].kind); ++r) {
        std::uint8_t* dst = row(offset + r);
        for (std::size_t i = 0; i < kRowBytes; ++i) dst[i] ^= mask[i];
    }
}

GarbledCircuit garble(std::shared_ptr<const Circuit> base, const ProviderEncodings& input_encodings, Drbg& rng,
                      const Digest* digest) {
    const Circuit& c = *base;
    if (input_encodings.size() != c.inputs.size())
        throw EncodingCoverageError("input encodings cover " + std::to_string(input_encodings.size()) +
                                    " providers, circuit has " + std::to_string(c.inputs.size()));

    std::vector<Encoding> wire(c.wire_count);
    std::vector<std::uint8_t> is_input(c.wire_count, 0);
    std::vector<std::uint8_t> hint(c.wire_count, 0);
    GarbledCircuit gc;
    gc.base = base;
    gc.input_encodings = input_encodings;
    gc.tables.circuit_digest = digest ? *digest : circuit::circuit_digest(c);
    gc.tables.gate_count = static_cast<std::uint32_t>(c.gates.size());

    for (std::size_t u = 0; u < c.inputs.size(); ++u) {
        if (input_encodings[u].size() != c.inputs[u].size())
            throw EncodingCoverageError("provider " + std::to_string(u) + " supplies " +
                                        std::to_string(input_encodings[u].size()) + " encodings for " +
                                        std::to_string(c.inputs[u].size()) + " input wires");
        for (std::size_t i = 0; i < c.inputs[u].size(); ++i) {
            const auto& e = input_encodings[u][i];
            if (!e.valid())
                throw EncodingCoverageError("provider " + std::to_string(u) + " wire " + std::to_string(i) +
                                            ": degenerate encoding");
            auto w = c.inputs[u][i];
            wire[w] = e;
            is_input[w] = 1;
            hint[w] = select_hint(e);
            gc.tables.select_hints.push_back(hint[w]);
        }
    }

    auto sel = [&](circuit::WireId w, const Label& k) -> bool {
        return is_input[w] ? hashed_bit(k, hint[w]) : k.lsb();
    };

    gc.tables.rows.assign(total_rows(c) * kRowBytes, 0);
    std::size_t offset = 0;
    for (std::size_t g = 0; g < c.gates.size(); ++g) {
        const auto& gate = c.gates[g];
        Encoding out{rng.label(), rng.label()};
        out.zero.bytes[15] &= 0xfe;
        out.zero.bytes[15] |= rng.bit();
        out.one.bytes[15] = static_cast<std::uint8_t>((out.one.bytes[15] & 0xfe) | !out.zero.lsb());
        wire[gate.out] = out;

        const auto gate_index = static_cast<std::uint32_t>(g);
        const auto& ea = wire[gate.in0];
        if (gate.unary()) {
            for (int va = 0; va < 2; ++va) {
                const Label& ka = ea.label(va);
                auto r = static_cast<std::uint8_t>(sel(gate.in0, ka));
                auto pad = row_pad(ka, nullptr, gate_index, r);
                const Label& result = out.label(!va);
                std::uint8_t* dst = gc.tables.row(offset + r);
                for (std::size_t i = 0; i < 16; ++i) dst[i] = pad[i] ^ result.bytes[i];
                dst[16] = pad[16];
                dst[17] = pad[17];
            }
            offset += 2;
            continue;
        }
        const auto& eb = wire[gate.in1];
        for (int va = 0; va < 2; ++va) {
            for (int vb = 0; vb < 2; ++vb) {
                const Label& ka = ea.label(va);
                const Label& kb = eb.label(vb);
                auto r = static_cast<std::uint8_t>(2 * sel(gate.in0, ka) + sel(gate.in1, kb));
                auto pad = row_pad(ka, &kb, gate_index, r);
                const Label& result = out.label(circuit::apply(gate.kind, va, vb));
                std::uint8_t* dst = gc.tables.row(offset + r);
                for (std::size_t i = 0; i < 16; ++i) dst[i] = pad[i] ^ result.bytes[i];
                dst[16] = pad[16];
                dst[17] = pad[17];
            }
        }
        offset += 4;
    }

    gc.output_encodings.resize(c.outputs.size());
    for (std::size_t u = 0; u < c.outputs.size(); ++u)
        for (auto w : c.outputs[u]) gc.output_encodings[u].push_back(wire[w]);
    return gc;
}

namespace {

template <bool Strict>
LenientEvaluation walk(const Circuit& c, const GarbledTables& t, const ProviderLabels& input_labels) {
    if (t.gate_count != c.gates.size()) throw EvaluationError("garbled gate count does not match the circuit");
    if (t.rows.size() != total_rows(c) * kRowBytes) throw EvaluationError("garbled table size does not match the circuit");
    if (t.select_hints.size() != c.input_wire_count()) throw EvaluationError("select hints do not cover the input wires");
    if (input_labels.size() != c.inputs.size()) throw InputShapeError("input labels cover the wrong provider count");

    std::vector<Label> label(c.wire_count);
    std::vector<std::uint8_t> sel(c.wire_count, 0);
    std::size_t h = 0;
    for (std::size_t u = 0; u < c.inputs.size(); ++u) {
        if (input_labels[u].size() != c.inputs[u].size())
            throw InputShapeError("provider " + std::to_string(u) + ": wrong number of input labels");
        for (std::size_t i = 0; i < c.inputs[u].size(); ++i) {
            auto w = c.inputs[u][i];
            label[w] = input_labels[u][i];
            sel[w] = hashed_bit(label[w], t.select_hints[h++]);
        }
    }

    LenientEvaluation result;
    std::size_t offset = 0;
    for (std::size_t g = 0; g < c.gates.size(); ++g) {
        const auto& gate = c.gates[g];
        const auto gate_index = static_cast<std::uint32_t>(g);
        std::uint8_t r;
        Pad pad;
        if (gate.unary()) {
            r = sel[gate.in0];
            pad = row_pad(label[gate.in0], nullptr, gate_index, r);
        } else {
            r = static_cast<std::uint8_t>(2 * sel[gate.in0] + sel[gate.in1]);
            pad = row_pad(label[gate.in0], &label[gate.in1], gate_index, r);
        }
        const std::uint8_t* src = t.rows.data() + (offset + r) * kRowBytes;
        offset += row_count(gate.kind);

        Label out;
        for (std::size_t i = 0; i < 16; ++i) out.bytes[i] = src[i] ^ pad[i];
        if ((src[16] ^ pad[16]) != 0 || (src[17] ^ pad[17]) != 0) {
            if constexpr (Strict)
                throw EvaluationError("gate " + std::to_string(g) + ": no row authenticates under the given labels");
            ++result.failed_rows;
        }
        label[gate.out] = out;
        sel[gate.out] = out.lsb();
    }

    result.outputs.resize(c.outputs.size());
    for (std::size_t u = 0; u < c.outputs.size(); ++u)
        for (auto w : c.outputs[u]) result.outputs[u].push_back(label[w]);
    return result;
}

} // namespace

ProviderLabels evaluate(const Circuit& c, const GarbledTables& tables, const ProviderLabels& input_labels) {
    return walk<true>(c, tables, input_labels).outputs;
}

LenientEvaluation evaluate_lenient(const Circuit& c, const GarbledTables& tables, const ProviderLabels& input_labels) {
    return walk<false>(c, tables, input_labels);
}

Bits decode(std::span<const Label> labels, std::span<const Encoding> encodings) {
    if (labels.size() != encodings.size())
        throw DecodeError("decode: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(encodings.size()) + " encodings");
    Bits out;
    out.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& e = encodings[i];
        if (!e.valid()) throw DecodeError("decode: degenerate encoding at output " + std::to_string(i));
        if (labels[i] == e.zero) out.push_back(0);
        else if (labels[i] == e.one) out.push_back(1);
        else throw DecodeError("decode: label at output " + std::to_string(i) + " matches neither encoding label");
    }
    return out;
}

std::vector<Label> select_labels(std::span<const Encoding> encodings, const Bits& bits) {
    if (bits.size() != encodings.size()) throw InputShapeError("select_labels: length mismatch");
    std::vector<Label> out;
    out.reserve(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) out.push_back(encodings[i].label(bits[i]));
    return out;
}

} // namespace dualgc::garble
