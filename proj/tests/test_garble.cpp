#include <gtest/gtest.h>

#include "dualgc/errors.hpp"
#include "dualgc/gadgets.hpp"
#include "dualgc/garble.hpp"
#include "random_circuit.hpp"

using namespace dualgc;
using namespace dualgc::garble;

namespace {

ProviderEncodings random_encodings(Drbg& rng, const circuit::Circuit& c) {
    ProviderEncodings e(c.inputs.size());
    for (std::size_t u = 0; u < c.inputs.size(); ++u)
        for (std::size_t i = 0; i < c.inputs[u].size(); ++i) e[u].push_back({rng.label(), rng.label()});
    return e;
}

ProviderLabels pick(const ProviderEncodings& e, const std::vector<Bits>& x) {
    ProviderLabels out;
    for (std::size_t u = 0; u < e.size(); ++u) out.push_back(select_labels(e[u], x[u]));
    return out;
}

} // namespace

TEST(Garble, RandomCircuitsDecodeToPlainOutput) {
    Drbg rng(21);
    for (int t = 0; t < 100; ++t) {
        auto c = std::make_shared<circuit::Circuit>(testutil::random_circuit(rng, 1 + rng.below(3), 1 + rng.below(80)));
        auto enc = random_encodings(rng, *c);
        auto gc = garble::garble(c, enc, rng);
        auto bytes = gc.tables.serialize();
        EXPECT_EQ(bytes.size(), gc.tables.byte_size());
        auto tables = GarbledTables::parse(bytes);
        for (int r = 0; r < 4; ++r) {
            auto x = testutil::random_inputs(rng, *c);
            auto out = evaluate(*c, tables, pick(enc, x));
            auto expect = testutil::reference_eval(*c, x);
            for (std::size_t u = 0; u < out.size(); ++u)
                EXPECT_EQ(decode(out[u], gc.output_encodings[u]), expect[u]);
        }
    }
}

TEST(Garble, TamperedGateFailsAuthentication) {
    Drbg rng(22);
    auto c = std::make_shared<circuit::Circuit>(circuit::build_gadget(circuit::GadgetKind::Adder, 4));
    auto enc = random_encodings(rng, *c);
    auto gc = garble::garble(c, enc, rng);
    std::array<std::uint8_t, kRowBytes> mask{};
    mask[0] = 1;
    mask[17] = 1;
    auto tampered = gc.tables;
    tampered.tamper_gate(*c, 0, mask);
    auto x = std::vector<Bits>{to_bits(5, 4), to_bits(9, 4)};
    EXPECT_THROW(evaluate(*c, tampered, pick(enc, x)), EvaluationError);
    auto lenient = evaluate_lenient(*c, tampered, pick(enc, x));
    EXPECT_GE(lenient.failed_rows, 1u);
    EXPECT_EQ(evaluate_lenient(*c, gc.tables, pick(enc, x)).failed_rows, 0u);
}

TEST(Garble, ForeignLabelsDoNotDecode) {
    Drbg rng(23);
    auto c = std::make_shared<circuit::Circuit>(circuit::build_gadget(circuit::GadgetKind::Comparator, 3));
    auto enc = random_encodings(rng, *c);
    auto gc = garble::garble(c, enc, rng);
    ProviderLabels wrong = pick(enc, {to_bits(1, 3), to_bits(2, 3)});
    wrong[0][0] = rng.label();
    auto out = evaluate_lenient(*c, gc.tables, wrong);
    EXPECT_THROW(decode(out.outputs[0], gc.output_encodings[0]), DecodeError);
}

TEST(Garble, CoverageAndShapeErrors) {
    Drbg rng(24);
    auto c = std::make_shared<circuit::Circuit>(circuit::build_gadget(circuit::GadgetKind::Adder, 2));
    auto enc = random_encodings(rng, *c);
    auto missing = enc;
    missing[1].pop_back();
    EXPECT_THROW(garble::garble(c, missing, rng), EncodingCoverageError);
    auto degenerate = enc;
    degenerate[0][0].one = degenerate[0][0].zero;
    EXPECT_THROW(garble::garble(c, degenerate, rng), EncodingCoverageError);
    auto gc = garble::garble(c, enc, rng);
    auto bytes = gc.tables.serialize();
    bytes.pop_back();
    EXPECT_THROW(GarbledTables::parse(bytes), FramingError);
    Encoding bad{Label{}, Label{}};
    EXPECT_THROW(decode(std::vector<Label>{Label{}}, std::vector<Encoding>{bad}), DecodeError);
}
