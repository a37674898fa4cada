#include <gtest/gtest.h>

#include "dualgc/errors.hpp"
#include "dualgc/gadgets.hpp"
#include "dualgc/garble.hpp"
#include "dualgc/output_verification.hpp"

using namespace dualgc;
using namespace dualgc::output;

namespace {

// Two independently garbled copies of a 4-bit adder (operands from providers
// 0 and 1, result to provider 0), each evaluated on the same inputs.
struct DualRun {
    std::shared_ptr<circuit::Circuit> c;
    garble::GarbledCircuit gc1, gc2;
    garble::ProviderLabels o1, o2;
};

DualRun dual_run(Drbg& rng, std::uint64_t a, std::uint64_t b) {
    DualRun r;
    r.c = std::make_shared<circuit::Circuit>(circuit::build_gadget(circuit::GadgetKind::Adder, 4));
    std::vector<Bits> x{to_bits(a, 4), to_bits(b, 4)};
    for (auto* gc : {&r.gc1, &r.gc2}) {
        garble::ProviderEncodings enc(r.c->inputs.size());
        for (std::size_t u = 0; u < enc.size(); ++u)
            for (std::size_t i = 0; i < r.c->inputs[u].size(); ++i) enc[u].push_back({rng.label(), rng.label()});
        *gc = garble::garble(r.c, enc, rng);
    }
    auto labels = [&](const garble::GarbledCircuit& gc) {
        garble::ProviderLabels l;
        for (std::size_t u = 0; u < x.size(); ++u) l.push_back(garble::select_labels(gc.input_encodings[u], x[u]));
        return garble::evaluate(*r.c, gc.tables, l);
    };
    r.o1 = labels(r.gc1);
    r.o2 = labels(r.gc2);
    return r;
}

} // namespace

TEST(Output, HonestRunAccepts) {
    Drbg rng(1);
    auto r = dual_run(rng, 9, 5);
    auto p1 = publish_output_commitments(1, r.gc1.output_encodings, r.o2, rng);
    auto p2 = publish_output_commitments(2, r.gc2.output_encodings, r.o1, rng);
    auto bundle = make_bundle(p1, p2);
    EXPECT_EQ(bundle.commitment_count(), 4 * r.c->outputs.size());
    EXPECT_EQ(OutputCommitmentBundle::parse(bundle.serialize()), bundle);

    auto v = verify_output(0, bundle, openings_for(0, p1, p2), 5);
    ASSERT_TRUE(v.accepted) << v.reason;
    EXPECT_EQ(from_bits(v.y), 14u);
    // The empty-output provider accepts an empty result.
    EXPECT_TRUE(verify_output(1, bundle, openings_for(1, p1, p2), 0).accepted);

    OutputFailureProof fake{0, openings_for(0, p1, p2)};
    EXPECT_EQ(verify_failure_proof(fake, bundle, 5), ProofStatus::Spurious);
}

TEST(Output, DifferentFunctionRejected) {
    Drbg rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        auto a = rng.below(16), b = rng.below(16);
        auto r = dual_run(rng, a, b);
        // P1 garbled a circuit whose output differs: relabel its result as a+b+1
        // by swapping the encoding of the lowest output bit.
        auto enc1 = r.gc1.output_encodings;
        std::swap(enc1[0].back().zero, enc1[0].back().one);
        auto p1 = publish_output_commitments(1, enc1, r.o2, rng);
        auto p2 = publish_output_commitments(2, r.gc2.output_encodings, r.o1, rng);
        auto bundle = make_bundle(p1, p2);
        auto v = verify_output(0, bundle, openings_for(0, p1, p2), 5);
        ASSERT_FALSE(v.accepted);
        ASSERT_TRUE(v.proof);
        EXPECT_EQ(verify_failure_proof(OutputFailureProof::parse(v.proof->serialize()), bundle, 5), ProofStatus::Confirmed);
    }
}

TEST(Output, FlippedLabelRejected) {
    Drbg rng(3);
    auto r = dual_run(rng, 3, 4);
    auto o1 = r.o1;
    o1[0][2].bytes[7] ^= 0x10;
    auto p1 = publish_output_commitments(1, r.gc1.output_encodings, r.o2, rng);
    auto p2 = publish_output_commitments(2, r.gc2.output_encodings, o1, rng);
    auto bundle = make_bundle(p1, p2);
    auto v = verify_output(0, bundle, openings_for(0, p1, p2), 5);
    EXPECT_FALSE(v.accepted);
    EXPECT_EQ(v.reason, "output labels do not decode");
    EXPECT_EQ(verify_failure_proof(*v.proof, bundle, 5), ProofStatus::Confirmed);
}

TEST(Output, BindingAndForgery) {
    Drbg rng(4);
    auto r = dual_run(rng, 1, 2);
    auto p1 = publish_output_commitments(1, r.gc1.output_encodings, r.o2, rng);
    auto p2 = publish_output_commitments(2, r.gc2.output_encodings, r.o1, rng);
    auto bundle = make_bundle(p1, p2);
    auto o = openings_for(0, p1, p2);

    auto altered = bundle;
    altered.providers[0].e2.digest[0] ^= 1;
    EXPECT_THROW(verify_output(0, altered, o, 5), OpeningError);

    auto forged = o;
    forged.o1.message[5] ^= 1;
    EXPECT_EQ(verify_failure_proof({0, forged}, bundle, 5), ProofStatus::Spurious);
    try {
        verify_output(0, bundle, forged, 5);
        FAIL();
    } catch (const OpeningError& e) {
        EXPECT_EQ(e.party(), "P2");
    }
}

TEST(Output, DegenerateEncodingRefused) {
    Drbg rng(5);
    auto l = rng.label();
    std::vector<std::vector<Encoding>> enc{{Encoding{l, l}}};
    std::vector<std::vector<Label>> lab{{l}};
    EXPECT_THROW(publish_output_commitments(1, enc, lab, rng), ProtocolError);
}
