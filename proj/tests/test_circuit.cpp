#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dualgc/errors.hpp"
#include "dualgc/gadgets.hpp"
#include "random_circuit.hpp"

using namespace dualgc;
using namespace dualgc::circuit;

namespace {

std::vector<Bits> operands(std::initializer_list<std::pair<std::uint64_t, std::size_t>> vals) {
    std::vector<Bits> out;
    for (auto [v, w] : vals) out.push_back(to_bits(v, w));
    return out;
}

} // namespace

TEST(Circuit, PlainMatchesReferenceOnRandomCircuits) {
    Drbg rng(11);
    for (int t = 0; t < 200; ++t) {
        auto c = testutil::random_circuit(rng, 1 + rng.below(3), 1 + rng.below(60));
        validate(c);
        auto in = testutil::random_inputs(rng, c);
        EXPECT_EQ(eval_plain(c, in), testutil::reference_eval(c, in));
    }
}

TEST(Circuit, NetlistRoundTrip) {
    Drbg rng(12);
    for (int t = 0; t < 50; ++t) {
        auto c = testutil::random_circuit(rng, 2, 30);
        auto text = to_netlist(c);
        auto back = from_netlist(text);
        EXPECT_EQ(to_netlist(back), text);
        EXPECT_EQ(circuit_digest(back), circuit_digest(c));
    }
}

TEST(Circuit, ValidationRejectsMalformed) {
    Circuit c;
    c.wire_count = 3;
    c.inputs = {{0}, {1}};
    c.outputs = {{2}, {}};
    c.gates = {{GateKind::And, 0, 1, 2}};
    EXPECT_NO_THROW(validate(c));

    auto bad = c;
    bad.gates[0].in1 = 2; // reads its own output
    EXPECT_THROW(validate(bad), CircuitFormatError);
    bad = c;
    bad.gates.push_back({GateKind::Xor, 0, 1, 2}); // double assignment
    EXPECT_THROW(validate(bad), CircuitFormatError);
    bad = c;
    bad.gates[0] = {GateKind::Not, 0, 1, 2};
    EXPECT_THROW(validate(bad), CircuitFormatError);
    bad = c;
    bad.inputs[1] = {0};
    EXPECT_THROW(validate(bad), CircuitFormatError);
    bad = c;
    bad.outputs[0] = {7};
    EXPECT_THROW(validate(bad), CircuitFormatError);
    EXPECT_THROW(from_netlist("wires 3\ngates 1\nfoo\n"), CircuitFormatError);
    EXPECT_THROW(eval_plain(c, {Bits{1}}), InputShapeError);
}

TEST(Gadgets, ExhaustiveSmallWidths) {
    for (std::size_t w = 1; w <= 5; ++w) {
        const std::uint64_t top = 1ull << w;
        auto adder = build_gadget(GadgetKind::Adder, w);
        auto mul = build_gadget(GadgetKind::Multiplier, w);
        auto cmp = build_gadget(GadgetKind::Comparator, w);
        auto sub = build_gadget(GadgetKind::Subtractor, w);
        auto div = build_gadget(GadgetKind::Divider, w);
        auto mux = build_gadget(GadgetKind::Mux, w);
        auto swp = build_gadget(GadgetKind::Swap, w);
        for (std::uint64_t a = 0; a < top; ++a) {
            for (std::uint64_t b = 0; b < top; ++b) {
                auto ab = operands({{a, w}, {b, w}});
                EXPECT_EQ(from_bits(eval_plain(adder, ab)[0]), a + b);
                EXPECT_EQ(from_bits(eval_plain(mul, ab)[0]), a * b);
                EXPECT_EQ(from_bits(eval_plain(cmp, ab)[0]), a >= b ? 1u : 0u);
                auto s = eval_plain(sub, ab)[0];
                EXPECT_EQ(from_bits(std::span(s).first(w)), (a - b) & (top - 1));
                EXPECT_EQ(s.back(), a < b ? 1 : 0);
                auto d = eval_plain(div, ab)[0];
                std::uint64_t q = b == 0 ? top - 1 : a / b;
                EXPECT_EQ(from_bits(std::span(d).first(w)), q) << a << "/" << b;
                if (b != 0) EXPECT_EQ(from_bits(std::span(d).last(w)), a % b);
                for (std::uint8_t sel = 0; sel < 2; ++sel) {
                    auto in = ab;
                    in.push_back(Bits{sel});
                    EXPECT_EQ(from_bits(eval_plain(mux, in)[0]), sel ? a : b);
                    auto sw = eval_plain(swp, in)[0];
                    EXPECT_EQ(from_bits(std::span(sw).first(w)), sel ? b : a);
                    EXPECT_EQ(from_bits(std::span(sw).last(w)), sel ? a : b);
                }
            }
        }
    }
}

TEST(Gadgets, IsqrtExhaustive) {
    for (std::size_t w = 1; w <= 12; ++w) {
        auto c = build_gadget(GadgetKind::Isqrt, w);
        for (std::uint64_t a = 0; a < (1ull << w); ++a) {
            std::uint64_t r = 0;
            while ((r + 1) * (r + 1) <= a) ++r;
            EXPECT_EQ(from_bits(eval_plain(c, {to_bits(a, w)})[0]), r) << "w=" << w << " a=" << a;
        }
    }
}

TEST(Gadgets, WideRandomOperands) {
    Drbg rng(5);
    const std::size_t w = 32;
    auto mul = build_gadget(GadgetKind::Multiplier, w);
    auto div = build_gadget(GadgetKind::Divider, w);
    auto sq = build_gadget(GadgetKind::Isqrt, w);
    for (int t = 0; t < 100; ++t) {
        std::uint64_t a = rng.below(1ull << 32), b = 1 + rng.below((1ull << 32) - 1);
        auto ab = operands({{a, w}, {b, w}});
        EXPECT_EQ(from_bits(eval_plain(mul, ab)[0]), a * b);
        auto d = eval_plain(div, ab)[0];
        EXPECT_EQ(from_bits(std::span(d).first(w)), a / b);
        std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(a)));
        while (r * r > a) --r;
        while ((r + 1) * (r + 1) <= a) ++r;
        EXPECT_EQ(from_bits(eval_plain(sq, {to_bits(a, w)})[0]), r);
    }
    EXPECT_THROW(build_gadget(GadgetKind::Adder, 0), GadgetWidthError);
}

TEST(Gadgets, SortingNetworkMatchesStableSort) {
    Drbg rng(9);
    for (std::size_t n : {1, 2, 3, 5, 8, 11}) {
        const std::size_t kw = 3, pw = 4;
        auto c = build_sorting_network(n, kw, pw);
        for (int t = 0; t < 20; ++t) {
            std::vector<std::pair<std::uint64_t, std::uint64_t>> rec;
            std::vector<Bits> in;
            for (std::size_t i = 0; i < n; ++i) {
                auto key = rng.below(1u << kw), pay = rng.below(1u << pw);
                rec.emplace_back(key, pay);
                auto bits = to_bits(key, kw);
                auto pb = to_bits(pay, pw);
                bits.insert(bits.end(), pb.begin(), pb.end());
                in.push_back(bits);
            }
            auto expect = rec;
            std::stable_sort(expect.begin(), expect.end(), [](auto& x, auto& y) { return x.first > y.first; });
            auto out = eval_plain(c, in);
            for (std::size_t p = 0; p < n; ++p) {
                EXPECT_EQ(from_bits(std::span(out[p]).first(kw)), expect[p].first);
                EXPECT_EQ(from_bits(std::span(out[p]).last(pw)), expect[p].second);
            }
        }
    }
}

TEST(Builder, ConstantsFoldWithoutGates) {
    Builder b(1);
    auto x = b.input(0);
    EXPECT_EQ(b.AND(x, Bit::constant(false)), Bit::constant(false));
    EXPECT_EQ(b.XOR(x, Bit::constant(false)), x);
    EXPECT_EQ(b.XOR(x, x), Bit::constant(false));
    EXPECT_EQ(b.OR(x, Bit::constant(true)), Bit::constant(true));
    EXPECT_EQ(b.gate_count(), 0u);
    b.output(0, Bit::constant(true));
    b.output(0, x);
    auto c = std::move(b).build();
    EXPECT_EQ(eval_plain(c, {Bits{0}})[0], (Bits{1, 0}));
    EXPECT_EQ(eval_plain(c, {Bits{1}})[0], (Bits{1, 1}));
}
