#include "dualgc/builder.hpp"

#include <algorithm>

#include "dualgc/errors.hpp"

namespace dualgc::circuit {

Builder::Builder(std::size_t providers) {
    c_.inputs.resize(providers);
    c_.outputs.resize(providers);
}

Bit Builder::input(std::size_t provider) {
    if (provider >= c_.inputs.size()) throw InputShapeError("no such provider");
    WireId w = c_.wire_count++;
    c_.inputs[provider].push_back(w);
    return Bit::wire(w);
}

Bus Builder::input_number(std::size_t provider, std::size_t width) {
    Bus bus(width, Bit::constant(false));
    for (std::size_t i = 0; i < width; ++i) bus[width - 1 - i] = input(provider);
    return bus;
}

void Builder::output(std::size_t provider, Bit b) {
    if (provider >= c_.outputs.size()) throw InputShapeError("no such provider");
    c_.outputs[provider].push_back(materialize(b).wire_id());
}

void Builder::output_number(std::size_t provider, const Bus& bus) {
    for (std::size_t i = bus.size(); i-- > 0;) output(provider, bus[i]);
}

Bit Builder::emit(GateKind kind, Bit a, Bit b) {
    WireId out = c_.wire_count++;
    c_.gates.push_back(Gate{kind, a.wire_id(), b.wire_id(), out});
    return Bit::wire(out);
}

Bit Builder::AND(Bit a, Bit b) {
    if (a.is_const()) return a.value() ? b : a;
    if (b.is_const()) return b.value() ? a : b;
    if (a == b) return a;
    return emit(GateKind::And, a, b);
}

Bit Builder::OR(Bit a, Bit b) {
    if (a.is_const()) return a.value() ? a : b;
    if (b.is_const()) return b.value() ? b : a;
    if (a == b) return a;
    return emit(GateKind::Or, a, b);
}

Bit Builder::XOR(Bit a, Bit b) {
    if (a.is_const()) return a.value() ? NOT(b) : b;
    if (b.is_const()) return b.value() ? NOT(a) : a;
    if (a == b) return Bit::constant(false);
    return emit(GateKind::Xor, a, b);
}

Bit Builder::NOT(Bit a) {
    if (a.is_const()) return Bit::constant(!a.value());
    return emit(GateKind::Not, a, a);
}

Bit Builder::zero_wire() {
    if (zero_ < 0) {
        auto first = std::find_if(c_.inputs.begin(), c_.inputs.end(), [](const auto& in) { return !in.empty(); });
        if (first == c_.inputs.end()) throw InputShapeError("cannot place a constant wire in a circuit without inputs");
        auto w = Bit::wire(first->front());
        zero_ = emit(GateKind::Xor, w, w).wire_id();
    }
    return Bit::wire(static_cast<WireId>(zero_));
}

Bit Builder::materialize(Bit b) {
    if (!b.is_const()) return b;
    auto zero = zero_wire();
    if (!b.value()) return zero;
    if (one_ < 0) one_ = emit(GateKind::Not, zero, zero).wire_id();
    return Bit::wire(static_cast<WireId>(one_));
}

Bus Builder::materialize(const Bus& bus) {
    Bus out;
    out.reserve(bus.size());
    for (auto b : bus) out.push_back(materialize(b));
    return out;
}

Circuit Builder::build() && {
    validate(c_);
    return std::move(c_);
}

// ---------------------------------------------------------------------------

std::size_t bit_length(std::uint64_t v) {
    std::size_t n = 0;
    while (v) {
        ++n;
        v >>= 1;
    }
    return n;
}

Bus constant(std::uint64_t value, std::size_t width) {
    Bus out(width, Bit::constant(false));
    for (std::size_t i = 0; i < width && i < 64; ++i) out[i] = Bit::constant((value >> i) & 1);
    return out;
}

Bus resize(const Bus& a, std::size_t width) {
    Bus out(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(std::min(width, a.size())));
    out.resize(width, Bit::constant(false));
    return out;
}

Bus shift_left(const Bus& a, std::size_t by) {
    Bus out(by, Bit::constant(false));
    out.insert(out.end(), a.begin(), a.end());
    return out;
}

Bus add_with_carry(Builder& b, const Bus& x, const Bus& y, Bit carry, std::size_t width) {
    Bus out;
    out.reserve(width);
    auto zero = Bit::constant(false);
    for (std::size_t i = 0; i < width; ++i) {
        Bit xi = i < x.size() ? x[i] : zero;
        Bit yi = i < y.size() ? y[i] : zero;
        Bit t1 = b.XOR(xi, carry);
        Bit t2 = b.XOR(yi, carry);
        out.push_back(b.XOR(t1, yi));
        if (i + 1 < width) carry = b.XOR(b.AND(t1, t2), carry);
    }
    return out;
}

Bus add(Builder& b, const Bus& x, const Bus& y) {
    return add_with_carry(b, x, y, Bit::constant(false), std::max(x.size(), y.size()) + 1);
}

std::pair<Bus, Bit> subtract(Builder& b, const Bus& x, const Bus& y) {
    std::size_t width = std::max(x.size(), y.size());
    auto zero = Bit::constant(false);
    Bit borrow = zero;
    Bus diff;
    diff.reserve(width);
    for (std::size_t i = 0; i < width; ++i) {
        Bit xi = i < x.size() ? x[i] : zero;
        Bit yi = i < y.size() ? y[i] : zero;
        Bit d = b.XOR(xi, yi);
        diff.push_back(b.XOR(d, borrow));
        // equal digits pass the borrow through, otherwise the borrow is y's digit
        borrow = b.XOR(borrow, b.AND(d, b.XOR(yi, borrow)));
    }
    return {diff, borrow};
}

Bit less_than(Builder& b, const Bus& x, const Bus& y) {
    std::size_t width = std::max(x.size(), y.size());
    auto zero = Bit::constant(false);
    Bit borrow = zero;
    for (std::size_t i = 0; i < width; ++i) {
        Bit xi = i < x.size() ? x[i] : zero;
        Bit yi = i < y.size() ? y[i] : zero;
        borrow = b.XOR(borrow, b.AND(b.XOR(xi, yi), b.XOR(yi, borrow)));
    }
    return borrow;
}

Bit greater_equal(Builder& b, const Bus& x, const Bus& y) { return b.NOT(less_than(b, x, y)); }

Bit any(Builder& b, const Bus& x) {
    Bit acc = Bit::constant(false);
    for (auto bit : x) acc = b.OR(acc, bit);
    return acc;
}

Bit equal(Builder& b, const Bus& x, const Bus& y) {
    std::size_t width = std::max(x.size(), y.size());
    Bus diff;
    diff.reserve(width);
    for (std::size_t i = 0; i < width; ++i) {
        Bit xi = i < x.size() ? x[i] : Bit::constant(false);
        Bit yi = i < y.size() ? y[i] : Bit::constant(false);
        diff.push_back(b.XOR(xi, yi));
    }
    return b.NOT(any(b, diff));
}

Bus mux(Builder& b, Bit sel, const Bus& x, const Bus& y) {
    std::size_t width = std::max(x.size(), y.size());
    auto zx = resize(x, width);
    auto zy = resize(y, width);
    Bus out;
    out.reserve(width);
    for (std::size_t i = 0; i < width; ++i) out.push_back(b.XOR(zy[i], b.AND(sel, b.XOR(zx[i], zy[i]))));
    return out;
}

void cond_swap(Builder& b, Bit sel, Bus& x, Bus& y) {
    if (x.size() != y.size()) {
        auto width = std::max(x.size(), y.size());
        x = resize(x, width);
        y = resize(y, width);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        Bit d = b.AND(sel, b.XOR(x[i], y[i]));
        x[i] = b.XOR(x[i], d);
        y[i] = b.XOR(y[i], d);
    }
}

Bus mask(Builder& b, const Bus& x, Bit m) {
    Bus out;
    out.reserve(x.size());
    for (auto bit : x) out.push_back(b.AND(bit, m));
    return out;
}

Bus multiply(Builder& b, const Bus& x, const Bus& y) {
    const std::size_t width = x.size() + y.size();
    Bus acc = constant(0, width);
    for (std::size_t j = 0; j < y.size(); ++j) {
        Bus partial = mask(b, x, y[j]);
        // add partial << j into acc[j..]
        Bus upper(acc.begin() + static_cast<std::ptrdiff_t>(j), acc.end());
        Bus sum = add_with_carry(b, upper, partial, Bit::constant(false), upper.size());
        std::copy(sum.begin(), sum.end(), acc.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return acc;
}

Bus multiply_const(Builder& b, const Bus& x, std::uint64_t k) {
    return multiply(b, x, constant(k, std::max<std::size_t>(bit_length(k), 1)));
}

std::pair<Bus, Bus> divide(Builder& b, const Bus& n, const Bus& d) {
    const std::size_t dw = d.size();
    Bus quotient(n.size(), Bit::constant(false));
    Bus rem = constant(0, dw);
    for (std::size_t i = n.size(); i-- > 0;) {
        Bus shifted;
        shifted.reserve(dw + 1);
        shifted.push_back(n[i]);
        shifted.insert(shifted.end(), rem.begin(), rem.end());
        auto [diff, borrow] = subtract(b, shifted, d);
        Bit q = b.NOT(borrow);
        quotient[i] = q;
        rem = resize(mux(b, q, diff, shifted), dw);
    }
    return {quotient, rem};
}

Bus isqrt(Builder& b, const Bus& x) {
    std::size_t n = x.size() + (x.size() & 1);
    const std::size_t half = n / 2;
    const std::size_t width = half + 3;
    Bus padded = resize(x, n);
    Bus rem = constant(0, width);
    Bus q = constant(0, half);
    for (std::size_t step = half; step-- > 0;) {
        Bit negative = rem[width - 1];
        // a = 4 * rem + next two bits
        Bus a{padded[2 * step], padded[2 * step + 1]};
        a.insert(a.end(), rem.begin(), rem.end());
        a = resize(a, width);
        // operand = 4q + (negative ? 3 : 1); subtract when rem >= 0, add otherwise
        Bus op{Bit::constant(true), negative};
        op.insert(op.end(), q.begin(), q.end());
        op = resize(op, width);
        Bit subtract_mode = b.NOT(negative);
        for (auto& bit : op) bit = b.XOR(bit, subtract_mode);
        rem = add_with_carry(b, a, op, subtract_mode, width);
        Bit digit = b.NOT(rem[width - 1]);
        // q = 2q + digit
        Bus next{digit};
        next.insert(next.end(), q.begin(), q.end());
        q = resize(next, half);
    }
    return q;
}

} // namespace dualgc::circuit
