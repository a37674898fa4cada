#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dualgc/builder.hpp"

namespace dualgc::circuit {

enum class GadgetKind { Adder, Multiplier, Comparator, Mux, Subtractor, Isqrt, Divider, Swap };

// Stand-alone circuit for one gadget over w-bit big-endian operands.
//
// Provider layout: operand a is provider 0, operand b is provider 1, and for
// mux/swap the select bit is provider 2. All results go to provider 0:
//   adder       a + b           (w + 1 bits)
//   multiplier  a * b           (2w bits)
//   comparator  a >= b          (1 bit)
//   mux         sel ? a : b     (w bits)
//   subtractor  a - b mod 2^w   (w bits), then borrow (1 bit)
//   isqrt       floor(sqrt(a))  (ceil(w / 2) bits), a only
//   divider     a / b, a % b    (w bits each)
//   swap        sel ? (b, a) : (a, b)  (2w bits)
Circuit build_gadget(GadgetKind kind, std::size_t width);

// Batcher bitonic network over a power-of-two padded record list. `before(x, y)`
// must return the bit "x belongs before y"; it has to define a strict total
// order on the records it sees, including padding. After the call
// records[0] comes first.
template <class Record>
void bitonic_sort(Builder& b, std::vector<Record>& records,
                  const std::function<Bit(Builder&, const Record&, const Record&)>& before,
                  const std::function<void(Builder&, Bit, Record&, Record&)>& swap) {
    const std::size_t n = records.size();
    for (std::size_t k = 2; k <= n; k <<= 1) {
        for (std::size_t j = k >> 1; j > 0; j >>= 1) {
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t partner = i ^ j;
                if (partner <= i) continue;
                bool forward = (i & k) == 0;
                Bit in_order = before(b, records[i], records[partner]);
                Bit exchange = forward ? b.NOT(in_order) : in_order;
                swap(b, exchange, records[i], records[partner]);
            }
        }
    }
}

std::size_t next_power_of_two(std::size_t n);

// n providers each supply key_width key bits then payload_width payload bits
// (big-endian). Output for provider p is the record at sorted position p:
// keys descending, equal keys in ascending provider order.
Circuit build_sorting_network(std::size_t n, std::size_t key_width, std::size_t payload_width);

} // namespace dualgc::circuit
