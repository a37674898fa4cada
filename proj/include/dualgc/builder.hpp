#pragma once

// Circuit construction with build-time constant folding, plus the arithmetic
// gadget library used by the auction circuit.
//
// A Bus is an unsigned number, least significant bit first. Inputs and
// outputs are exposed big-endian through input_number/output_number.

#include <cstdint>
#include <utility>
#include <vector>

#include "dualgc/circuit.hpp"

namespace dualgc::circuit {

class Bit {
public:
    static Bit constant(bool v) { return Bit(v ? kOne : kZero); }
    static Bit wire(WireId w) { return Bit(static_cast<std::int64_t>(w)); }

    bool is_const() const { return repr_ < 0; }
    bool value() const { return repr_ == kOne; }
    WireId wire_id() const { return static_cast<WireId>(repr_); }

    friend bool operator==(const Bit&, const Bit&) = default;

private:
    static constexpr std::int64_t kZero = -1;
    static constexpr std::int64_t kOne = -2;
    explicit Bit(std::int64_t repr) : repr_(repr) {}
    std::int64_t repr_;
};

using Bus = std::vector<Bit>;

class Builder {
public:
    explicit Builder(std::size_t providers);

    Bit input(std::size_t provider);
    // Reads `width` big-endian input wires.
    Bus input_number(std::size_t provider, std::size_t width);
    void output(std::size_t provider, Bit b);
    // Emits the bus big-endian.
    void output_number(std::size_t provider, const Bus& bus);

    Bit AND(Bit a, Bit b);
    Bit OR(Bit a, Bit b);
    Bit XOR(Bit a, Bit b);
    Bit NOT(Bit a);

    // Forces a constant onto a real wire so downstream gates are not folded.
    Bit materialize(Bit b);
    Bus materialize(const Bus& bus);

    std::size_t gate_count() const { return c_.gates.size(); }
    Circuit build() &&;

private:
    Bit emit(GateKind kind, Bit a, Bit b);
    Bit zero_wire();

    Circuit c_;
    std::int64_t zero_ = -1;
    std::int64_t one_ = -1;
};

Bus constant(std::uint64_t value, std::size_t width);
// Truncates or zero-extends.
Bus resize(const Bus& a, std::size_t width);
Bus shift_left(const Bus& a, std::size_t by);
std::size_t bit_length(std::uint64_t v);

// a + b, one bit wider than the wider operand.
Bus add(Builder& b, const Bus& x, const Bus& y);
// a + b + carry_in truncated to `width` bits.
Bus add_with_carry(Builder& b, const Bus& x, const Bus& y, Bit carry_in, std::size_t width);
// a - b (width of the wider operand) and the borrow-out bit (1 iff a < b).
std::pair<Bus, Bit> subtract(Builder& b, const Bus& x, const Bus& y);
Bit less_than(Builder& b, const Bus& x, const Bus& y);
Bit greater_equal(Builder& b, const Bus& x, const Bus& y);
Bit equal(Builder& b, const Bus& x, const Bus& y);
Bit any(Builder& b, const Bus& x);
// sel ? x : y
Bus mux(Builder& b, Bit sel, const Bus& x, const Bus& y);
// Exchanges x and y when sel is set.
void cond_swap(Builder& b, Bit sel, Bus& x, Bus& y);
// Bitwise AND with a single bit.
Bus mask(Builder& b, const Bus& x, Bit m);
// Full product, |x| + |y| bits.
Bus multiply(Builder& b, const Bus& x, const Bus& y);
Bus multiply_const(Builder& b, const Bus& x, std::uint64_t k);
// Restoring long division: quotient has |n| bits, remainder |d| bits.
// A zero divisor yields an all-ones quotient.
std::pair<Bus, Bus> divide(Builder& b, const Bus& n, const Bus& d);
// Non-restoring bit-serial floor square root; ceil(|x| / 2) bits.
Bus isqrt(Builder& b, const Bus& x);

} // namespace dualgc::circuit
