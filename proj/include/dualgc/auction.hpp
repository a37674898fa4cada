#pragma once

// Truthful cloud resource auction: integer reference implementation and the
// equivalent data-oblivious circuit.
//
// Bidder j asks for q_j^i instances of VM type i at b_j^i per instance.
//   S_j = sum_i q_j^i * b_j^i        T_j = sum_i q_j^i * w_i
// Bidders are ranked by S_j / sqrt(T_j), compared exactly as
// S_a^2 * T_b versus S_b^2 * T_a; ties go to the lower index and bidders with
// T_j = 0 rank last. Winners are chosen greedily in rank order subject to the
// per-type capacities. A winner's critical bidder is the first bidder ranked
// after it that lost but wins once the winner is removed; the winner pays
//   S_c * isqrt(floor(T_j * 4^f / T_c))
// as a fixed-point number with f fraction bits, or 0 without a critical bidder.
//
// Inputs are validated against declared bounds: a bidder whose quantity
// exceeds max_quantity or whose bid exceeds max_bid is treated as requesting
// nothing.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dualgc/bytes.hpp"
#include "dualgc/circuit.hpp"
#include "dualgc/crypto.hpp"

namespace dualgc::auction {

struct AuctionConfig {
    std::size_t m = 6;
    std::vector<std::uint64_t> capacities;  // k_i
    std::vector<std::uint64_t> weights;     // w_i
    std::size_t w = 16;
    std::size_t f = 8;
    std::size_t s = 10;
    std::uint64_t max_quantity = 3;
    std::uint64_t max_bid = 100;

    // m types, every capacity k, weights 1..m.
    static AuctionConfig uniform(std::size_t m, std::uint64_t k);
    // Throws WidthError or InputShapeError on an unusable configuration.
    void validate() const;
};

struct TypeBid {
    std::uint64_t quantity = 0;
    std::uint64_t bid = 0;
    friend bool operator==(const TypeBid&, const TypeBid&) = default;
};

struct Bid {
    std::string id;
    std::vector<TypeBid> types;
};

struct AuctionOutcome {
    std::size_t f = 8;
    std::vector<std::uint8_t> allocation;
    std::vector<std::uint64_t> payment_raw;  // fixed point, f fraction bits

    double payment(std::size_t j) const;
    friend bool operator==(const AuctionOutcome&, const AuctionOutcome&) = default;
};

// Bit widths derived from the configuration and bidder count.
struct Widths {
    std::size_t q = 0;        // quantity after validation
    std::size_t b = 0;        // per-instance bid after validation
    std::size_t s = 0;        // S
    std::size_t t = 0;        // T
    std::size_t s2 = 0;       // S^2
    std::size_t product = 0;  // S^2 * T
    std::size_t ratio = 0;    // T * 4^f / T_c
    std::size_t root = 0;     // isqrt of the ratio
    std::size_t payment = 0;  // S_c * root
    std::size_t index = 0;    // padded record index
};

// Throws WidthError if an intermediate exceeds 64 bits.
Widths derive_widths(const AuctionConfig& cfg, std::size_t n);

// Throws WidthError when a value exceeds its declared bound or w bits, and
// InputShapeError when a bid has the wrong number of types.
AuctionOutcome oracle_run(const AuctionConfig& cfg, const std::vector<Bid>& bids);

// Same mechanism after the circuit's input validation: out-of-bound bidders
// request nothing. Values must still fit in w bits.
AuctionOutcome oracle_run_lenient(const AuctionConfig& cfg, const std::vector<Bid>& bids);

// Providers 0..n-1 are the bidders; provider n is the cloud provider with no
// input. Bidder j inputs (q^1, b^1, ..., q^m, b^m), w bits each, big-endian,
// and receives x_j followed by its payment (Widths::payment bits,
// big-endian). The cloud provider receives every bidder's pair in order.
circuit::Circuit build_auction_circuit(const AuctionConfig& cfg, std::size_t n);

// Per-provider input bits for the circuit above, cloud provider last (empty).
std::vector<Bits> encode_inputs(const AuctionConfig& cfg, const std::vector<Bid>& bids);
Bid decode_bid(const AuctionConfig& cfg, const Bits& bits);

// Reads one bidder's own output.
std::pair<std::uint8_t, std::uint64_t> decode_bidder_output(const Widths& widths, const Bits& bits);
// Reads the cloud provider's output.
AuctionOutcome decode_cloud_output(const AuctionConfig& cfg, std::size_t n, const Bits& bits);

// Uniform quantities in [0, max_quantity] and bids in [0, max_bid].
std::vector<Bid> random_bids(const AuctionConfig& cfg, std::size_t n, Drbg& rng);

// Line format: `id, q1, b1, ..., qm, bm`; blank lines and `#` comments skipped.
std::vector<Bid> parse_bids(const std::string& text, std::size_t m);
std::vector<Bid> load_bids(const std::filesystem::path& path, std::size_t m);

// key=value lines: m, capacities, weights (comma lists), w, f, s,
// max_quantity, max_bid. Unset capacities default to 100 per type and unset
// weights to 1..m.
AuctionConfig parse_config(const std::string& text);
AuctionConfig load_config(const std::filesystem::path& path);

} // namespace dualgc::auction
