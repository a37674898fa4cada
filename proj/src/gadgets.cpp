#include "dualgc/gadgets.hpp"

#include "dualgc/errors.hpp"

namespace dualgc::circuit {

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

Circuit build_gadget(GadgetKind kind, std::size_t width) {
    if (width == 0) throw GadgetWidthError("gadget width must be at least 1");
    const bool has_select = kind == GadgetKind::Mux || kind == GadgetKind::Swap;
    const bool unary = kind == GadgetKind::Isqrt;
    Builder b(has_select ? 3 : (unary ? 1 : 2));
    Bus a = b.input_number(0, width);
    Bus y = unary ? Bus{} : b.input_number(1, width);
    Bit sel = has_select ? b.input(2) : Bit::constant(false);

    switch (kind) {
    case GadgetKind::Adder: b.output_number(0, add(b, a, y)); break;
    case GadgetKind::Multiplier: b.output_number(0, multiply(b, a, y)); break;
    case GadgetKind::Comparator: b.output(0, greater_equal(b, a, y)); break;
    case GadgetKind::Mux: b.output_number(0, mux(b, sel, a, y)); break;
    case GadgetKind::Subtractor: {
        auto [diff, borrow] = subtract(b, a, y);
        b.output_number(0, diff);
        b.output(0, borrow);
        break;
    }
    case GadgetKind::Isqrt: b.output_number(0, isqrt(b, a)); break;
    case GadgetKind::Divider: {
        auto [q, r] = divide(b, a, y);
        b.output_number(0, q);
        b.output_number(0, r);
        break;
    }
    case GadgetKind::Swap:
        cond_swap(b, sel, a, y);
        b.output_number(0, a);
        b.output_number(0, y);
        break;
    }
    return std::move(b).build();
}

Circuit build_sorting_network(std::size_t n, std::size_t key_width, std::size_t payload_width) {
    if (n == 0) throw InputShapeError("sorting network needs at least one record");
    struct Record {
        Bus key;
        Bus payload;
        Bus index;
    };
    const std::size_t padded = next_power_of_two(n);
    const std::size_t index_width = std::max<std::size_t>(bit_length(padded - 1), 1);

    Builder b(n);
    std::vector<Record> records;
    records.reserve(padded);
    for (std::size_t u = 0; u < padded; ++u) {
        Record r;
        if (u < n) {
            r.key = b.input_number(u, key_width);
            r.payload = b.input_number(u, payload_width);
        } else {
            r.key = constant(0, key_width);
            r.payload = constant(0, payload_width);
        }
        r.index = constant(u, index_width);
        records.push_back(std::move(r));
    }

    bitonic_sort<Record>(
        b, records,
        [](Builder& bb, const Record& x, const Record& y) {
            Bit greater = less_than(bb, y.key, x.key);
            Bit tie = equal(bb, x.key, y.key);
            return bb.OR(greater, bb.AND(tie, less_than(bb, x.index, y.index)));
        },
        [](Builder& bb, Bit sel, Record& x, Record& y) {
            cond_swap(bb, sel, x.key, y.key);
            cond_swap(bb, sel, x.payload, y.payload);
            cond_swap(bb, sel, x.index, y.index);
        });

    for (std::size_t p = 0; p < n; ++p) {
        b.output_number(p, records[p].key);
        b.output_number(p, records[p].payload);
    }
    return std::move(b).build();
}

} // namespace dualgc::circuit
