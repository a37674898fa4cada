#include "dualgc/auction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dualgc/builder.hpp"
#include "dualgc/errors.hpp"
#include "dualgc/gadgets.hpp"

namespace dualgc::auction {

using namespace dualgc::circuit;

namespace {

using u128 = unsigned __int128;

std::uint64_t isqrt64(std::uint64_t x) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(x)));
    while (static_cast<u128>(r) * r > x) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= x) ++r;
    return r;
}

std::uint64_t max_value(std::size_t bits) { return bits >= 64 ? ~0ull : (1ull << bits) - 1; }

struct Totals {
    std::uint64_t S = 0;
    std::uint64_t T = 0;
    std::vector<std::uint64_t> q;
};

std::vector<Totals> totals(const AuctionConfig& cfg, const std::vector<Bid>& bids) {
    std::vector<Totals> out;
    for (const auto& bid : bids) {
        Totals t;
        for (std::size_t i = 0; i < cfg.m; ++i) {
            t.S += bid.types[i].quantity * bid.types[i].bid;
            t.T += bid.types[i].quantity * cfg.weights[i];
            t.q.push_back(bid.types[i].quantity);
        }
        out.push_back(std::move(t));
    }
    return out;
}

// Exact ranking: nonzero T first, then S_a^2 * T_b > S_b^2 * T_a, then index.
std::vector<std::size_t> rank(const std::vector<Totals>& t) {
    std::vector<std::size_t> order(t.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        bool nza = t[a].T != 0, nzb = t[b].T != 0;
        if (nza != nzb) return nza;
        u128 lhs = static_cast<u128>(t[a].S) * t[a].S * t[b].T;
        u128 rhs = static_cast<u128>(t[b].S) * t[b].S * t[a].T;
        if (lhs != rhs) return lhs > rhs;
        return a < b;
    });
    return order;
}

// Greedy allocation along `order`, ignoring the bidder at position `skip`.
std::vector<bool> greedy(const AuctionConfig& cfg, const std::vector<Totals>& t, const std::vector<std::size_t>& order,
                         std::size_t skip) {
    std::vector<std::uint64_t> used(cfg.m, 0);
    std::vector<bool> wins(order.size(), false);
    for (std::size_t p = 0; p < order.size(); ++p) {
        if (p == skip) continue;
        const auto& x = t[order[p]];
        if (x.T == 0) continue;
        bool fits = true;
        for (std::size_t i = 0; i < cfg.m; ++i) fits = fits && used[i] + x.q[i] <= cfg.capacities[i];
        if (!fits) continue;
        wins[p] = true;
        for (std::size_t i = 0; i < cfg.m; ++i) used[i] += x.q[i];
    }
    return wins;
}

AuctionOutcome run_mechanism(const AuctionConfig& cfg, const std::vector<Bid>& bids) {
    auto t = totals(cfg, bids);
    auto order = rank(t);
    const std::size_t none = order.size();
    auto wins = greedy(cfg, t, order, none);

    AuctionOutcome out;
    out.f = cfg.f;
    out.allocation.assign(bids.size(), 0);
    out.payment_raw.assign(bids.size(), 0);
    for (std::size_t p = 0; p < order.size(); ++p) {
        if (!wins[p]) continue;
        const std::size_t j = order[p];
        out.allocation[j] = 1;
        auto without = greedy(cfg, t, order, p);
        for (std::size_t q = p + 1; q < order.size(); ++q) {
            if (wins[q] || !without[q]) continue;
            const auto& c = t[order[q]];
            std::uint64_t ratio = static_cast<std::uint64_t>((static_cast<u128>(t[j].T) << (2 * cfg.f)) / c.T);
            out.payment_raw[j] = c.S * isqrt64(ratio);
            break;
        }
    }
    return out;
}

void check_shape(const AuctionConfig& cfg, const std::vector<Bid>& bids) {
    cfg.validate();
    derive_widths(cfg, std::max<std::size_t>(bids.size(), 1));
    const auto top = max_value(cfg.w);
    for (std::size_t j = 0; j < bids.size(); ++j) {
        if (bids[j].types.size() != cfg.m)
            throw InputShapeError("bidder " + std::to_string(j) + " bids on " + std::to_string(bids[j].types.size()) +
                                  " types, expected " + std::to_string(cfg.m));
        for (const auto& tb : bids[j].types)
            if (tb.quantity > top || tb.bid > top)
                throw WidthError("bidder " + std::to_string(j) + ": value exceeds " + std::to_string(cfg.w) + " bits");
    }
}

bool within_bounds(const AuctionConfig& cfg, const Bid& bid) {
    return std::all_of(bid.types.begin(), bid.types.end(),
                       [&](const TypeBid& tb) { return tb.quantity <= cfg.max_quantity && tb.bid <= cfg.max_bid; });
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        auto b = item.find_first_not_of(" \t\r");
        auto e = item.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
    }
    return out;
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
        v = std::stoull(s, &used, 10);
    } catch (const std::exception&) {
        throw UsageError(what + ": not an unsigned integer: '" + s + "'");
    }
    if (used != s.size()) throw UsageError(what + ": not an unsigned integer: '" + s + "'");
    return v;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

AuctionConfig AuctionConfig::uniform(std::size_t m, std::uint64_t k) {
    AuctionConfig c;
    c.m = m;
    c.capacities.assign(m, k);
    c.weights.resize(m);
    std::iota(c.weights.begin(), c.weights.end(), 1);
    return c;
}

void AuctionConfig::validate() const {
    if (m < 1) throw InputShapeError("auction needs at least one VM type");
    if (capacities.size() != m || weights.size() != m)
        throw InputShapeError("capacities and weights must list one value per VM type");
    if (w < 1 || w > 32) throw WidthError("bit width w must be in [1, 32]");
    if (f > 16) throw WidthError("fraction bits f must be at most 16");
    for (auto wt : weights)
        if (wt < 1) throw InputShapeError("weights must be at least 1");
    for (auto k : capacities)
        if (k > max_value(w)) throw WidthError("capacity exceeds " + std::to_string(w) + " bits");
    if (max_quantity > max_value(w) || max_bid > max_value(w)) throw WidthError("declared bounds exceed w bits");
}

double AuctionOutcome::payment(std::size_t j) const { return std::ldexp(static_cast<double>(payment_raw.at(j)), -static_cast<int>(f)); }

Widths derive_widths(const AuctionConfig& cfg, std::size_t n) {
    cfg.validate();
    if (n < 1) throw InputShapeError("auction needs at least one bidder");
    Widths wd;
    auto wsum = std::accumulate(cfg.weights.begin(), cfg.weights.end(), u128{0});
    u128 smax = static_cast<u128>(cfg.m) * cfg.max_quantity * cfg.max_bid;
    u128 tmax = wsum * cfg.max_quantity;
    if (smax > max_value(32) || tmax > max_value(32)) throw WidthError("bid totals exceed 32 bits");
    wd.q = bit_length(cfg.max_quantity);
    wd.b = bit_length(cfg.max_bid);
    wd.s = bit_length(static_cast<std::uint64_t>(smax));
    wd.t = bit_length(static_cast<std::uint64_t>(tmax));
    wd.s2 = 2 * wd.s;
    wd.product = wd.s2 + wd.t;
    if (wd.product > 64) throw WidthError("S^2 * T needs " + std::to_string(wd.product) + " bits, more than 64");
    wd.ratio = wd.t + 2 * cfg.f;
    wd.root = (wd.ratio + 1) / 2;
    wd.payment = wd.s + wd.root;
    if (wd.ratio > 64 || wd.payment > 64) throw WidthError("payment needs more than 64 bits");
    wd.index = std::max<std::size_t>(1, bit_length(next_power_of_two(n) - 1));
    return wd;
}

AuctionOutcome oracle_run(const AuctionConfig& cfg, const std::vector<Bid>& bids) {
    check_shape(cfg, bids);
    for (std::size_t j = 0; j < bids.size(); ++j)
        if (!within_bounds(cfg, bids[j]))
            throw WidthError("bidder " + std::to_string(j) + ": quantity or bid above the declared bound");
    return run_mechanism(cfg, bids);
}

AuctionOutcome oracle_run_lenient(const AuctionConfig& cfg, const std::vector<Bid>& bids) {
    check_shape(cfg, bids);
    auto cleaned = bids;
    for (auto& bid : cleaned)
        if (!within_bounds(cfg, bid))
            for (auto& tb : bid.types) tb.quantity = 0;
    return run_mechanism(cfg, cleaned);
}

namespace {

struct Record {
    Bit nz = Bit::constant(false);
    Bus S, T, S2, idx;
    std::vector<Bus> q;
};

Record select_record(Builder& b, Bit sel, const Record& x, const Record& y) {
    Record r;
    r.nz = b.XOR(y.nz, b.AND(sel, b.XOR(x.nz, y.nz)));
    r.S = mux(b, sel, x.S, y.S);
    r.T = mux(b, sel, x.T, y.T);
    r.S2 = mux(b, sel, x.S2, y.S2);
    r.idx = mux(b, sel, x.idx, y.idx);
    for (std::size_t i = 0; i < x.q.size(); ++i) r.q.push_back(mux(b, sel, x.q[i], y.q[i]));
    return r;
}

void swap_records(Builder& b, Bit sel, Record& x, Record& y) {
    Record nx = select_record(b, sel, y, x);
    Record ny = select_record(b, sel, x, y);
    x = std::move(nx);
    y = std::move(ny);
}

Bit ranks_before(Builder& b, const Record& x, const Record& y) {
    Bit nz_first = b.AND(x.nz, b.NOT(y.nz));
    Bit same_nz = b.NOT(b.XOR(x.nz, y.nz));
    Bus lhs = multiply(b, x.S2, y.T);
    Bus rhs = multiply(b, y.S2, x.T);
    Bit gt = less_than(b, rhs, lhs);
    Bit eq = equal(b, lhs, rhs);
    Bit idx_lt = less_than(b, x.idx, y.idx);
    return b.OR(nz_first, b.AND(same_nz, b.OR(gt, b.AND(eq, idx_lt))));
}

// One greedy step: does a record with quantities q fit on top of `used`?
Bit fits(Builder& b, Bit nz, const std::vector<Bus>& used, const std::vector<Bus>& q, const std::vector<Bus>& cap,
         std::vector<Bus>& next) {
    Bit ok = nz;
    next.clear();
    for (std::size_t i = 0; i < used.size(); ++i) {
        Bus sum = add(b, used[i], q[i]);
        ok = b.AND(ok, b.NOT(less_than(b, resize(cap[i], sum.size()), sum)));
        next.push_back(resize(sum, used[i].size()));
    }
    return ok;
}

std::vector<Bus> take_if(Builder& b, Bit sel, const std::vector<Bus>& x, const std::vector<Bus>& y) {
    std::vector<Bus> out;
    for (std::size_t i = 0; i < x.size(); ++i) out.push_back(mux(b, sel, x[i], y[i]));
    return out;
}

} // namespace

circuit::Circuit build_auction_circuit(const AuctionConfig& cfg, std::size_t n) {
    const Widths wd = derive_widths(cfg, n);
    const std::size_t N = next_power_of_two(n);
    Builder b(n + 1);

    // Per-bidder records with input validation.
    std::vector<Record> recs;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Bus> qs, bs;
        for (std::size_t i = 0; i < cfg.m; ++i) {
            qs.push_back(b.input_number(j, cfg.w));
            bs.push_back(b.input_number(j, cfg.w));
        }
        Bit valid = Bit::constant(true);
        for (std::size_t i = 0; i < cfg.m; ++i) {
            valid = b.AND(valid, b.NOT(less_than(b, constant(cfg.max_quantity, cfg.w), qs[i])));
            valid = b.AND(valid, b.NOT(less_than(b, constant(cfg.max_bid, cfg.w), bs[i])));
        }
        Record r;
        Bus S = constant(0, wd.s), T = constant(0, wd.t);
        for (std::size_t i = 0; i < cfg.m; ++i) {
            Bus q = mask(b, resize(qs[i], wd.q), valid);
            Bus bid = resize(bs[i], wd.b);
            S = resize(add(b, S, multiply(b, q, bid)), wd.s);
            T = resize(add(b, T, multiply_const(b, q, cfg.weights[i])), wd.t);
            r.q.push_back(q);
        }
        r.nz = any(b, T);
        r.S = S;
        r.T = T;
        r.S2 = multiply(b, S, S);
        r.idx = constant(j, wd.index);
        recs.push_back(std::move(r));
    }
    for (std::size_t j = n; j < N; ++j) {
        Record d;
        d.nz = Bit::constant(false);
        d.S = constant(0, wd.s);
        d.T = constant(0, wd.t);
        d.S2 = constant(0, wd.s2);
        d.idx = constant(j, wd.index);
        d.q.assign(cfg.m, constant(0, wd.q));
        recs.push_back(std::move(d));
    }

    bitonic_sort<Record>(b, recs, ranks_before, swap_records);
    // Padding sorts behind every real bidder, so positions 0..n-1 are the bidders.
    recs.resize(n);

    // Capacities are real wires so the circuit shape does not depend on them.
    b.materialize(Bit::constant(true));
    std::vector<Bus> cap;
    for (std::size_t i = 0; i < cfg.m; ++i) cap.push_back(b.materialize(constant(cfg.capacities[i], cfg.w)));

    std::vector<Bus> used(cfg.m, constant(0, cfg.w));
    std::vector<std::vector<Bus>> used_before;
    std::vector<Bit> wins;
    for (std::size_t p = 0; p < n; ++p) {
        used_before.push_back(used);
        std::vector<Bus> next;
        Bit win = fits(b, recs[p].nz, used, recs[p].q, cap, next);
        used = take_if(b, win, next, used);
        wins.push_back(win);
    }

    std::vector<Bus> pay(n);
    for (std::size_t p = 0; p < n; ++p) {
        // Greedy again from p + 1 with p removed.
        std::vector<Bus> u = used_before[p];
        Bit found = Bit::constant(false);
        Bus Sc = constant(0, wd.s), Tc = constant(0, wd.t);
        for (std::size_t q = p + 1; q < n; ++q) {
            std::vector<Bus> next;
            Bit win = fits(b, recs[q].nz, u, recs[q].q, cap, next);
            u = take_if(b, win, next, u);
            Bit crit = b.AND(b.AND(win, b.NOT(wins[q])), b.NOT(found));
            found = b.OR(found, crit);
            Sc = mux(b, crit, recs[q].S, Sc);
            Tc = mux(b, crit, recs[q].T, Tc);
        }
        Bus num = shift_left(recs[p].T, 2 * cfg.f);
        Bus ratio = divide(b, num, Tc).first;
        Bus root = resize(isqrt(b, resize(ratio, wd.ratio)), wd.root);
        Bus raw = resize(multiply(b, Sc, root), wd.payment);
        pay[p] = mask(b, raw, b.AND(wins[p], found));
    }

    // Back to bidder order: sort ascending by index.
    struct Result {
        Bus idx;
        Bit win;
        Bus pay;
    };
    std::vector<Result> res;
    for (std::size_t p = 0; p < n; ++p) res.push_back({recs[p].idx, wins[p], pay[p]});
    for (std::size_t p = n; p < N; ++p) res.push_back({constant(p, wd.index), Bit::constant(false), constant(0, wd.payment)});
    bitonic_sort<Result>(
        b, res, [](Builder& bb, const Result& x, const Result& y) { return less_than(bb, x.idx, y.idx); },
        [](Builder& bb, Bit sel, Result& x, Result& y) {
            Bit dw = bb.AND(sel, bb.XOR(x.win, y.win));
            x.win = bb.XOR(x.win, dw);
            y.win = bb.XOR(y.win, dw);
            cond_swap(bb, sel, x.idx, y.idx);
            cond_swap(bb, sel, x.pay, y.pay);
        });

    for (std::size_t j = 0; j < n; ++j) {
        b.output(j, res[j].win);
        b.output_number(j, res[j].pay);
    }
    for (std::size_t j = 0; j < n; ++j) {
        b.output(n, res[j].win);
        b.output_number(n, res[j].pay);
    }
    return std::move(b).build();
}

std::vector<Bits> encode_inputs(const AuctionConfig& cfg, const std::vector<Bid>& bids) {
    check_shape(cfg, bids);
    std::vector<Bits> out;
    for (const auto& bid : bids) {
        Bits bits;
        for (const auto& tb : bid.types) {
            auto q = to_bits(tb.quantity, cfg.w);
            auto v = to_bits(tb.bid, cfg.w);
            bits.insert(bits.end(), q.begin(), q.end());
            bits.insert(bits.end(), v.begin(), v.end());
        }
        out.push_back(std::move(bits));
    }
    out.emplace_back();
    return out;
}

Bid decode_bid(const AuctionConfig& cfg, const Bits& bits) {
    if (bits.size() != 2 * cfg.m * cfg.w) throw InputShapeError("bid bits have the wrong length");
    Bid bid;
    for (std::size_t i = 0; i < cfg.m; ++i) {
        auto base = std::span(bits).subspan(2 * i * cfg.w);
        bid.types.push_back({from_bits(base.first(cfg.w)), from_bits(base.subspan(cfg.w, cfg.w))});
    }
    return bid;
}

std::pair<std::uint8_t, std::uint64_t> decode_bidder_output(const Widths& wd, const Bits& bits) {
    if (bits.size() != 1 + wd.payment) throw DecodeError("bidder output has the wrong length");
    return {bits[0], from_bits(std::span(bits).subspan(1))};
}

AuctionOutcome decode_cloud_output(const AuctionConfig& cfg, std::size_t n, const Bits& bits) {
    auto wd = derive_widths(cfg, n);
    const std::size_t per = 1 + wd.payment;
    if (bits.size() != n * per) throw DecodeError("cloud output has the wrong length");
    AuctionOutcome out;
    out.f = cfg.f;
    for (std::size_t j = 0; j < n; ++j) {
        Bits one(bits.begin() + static_cast<std::ptrdiff_t>(j * per), bits.begin() + static_cast<std::ptrdiff_t>((j + 1) * per));
        auto [x, pay] = decode_bidder_output(wd, one);
        out.allocation.push_back(x);
        out.payment_raw.push_back(pay);
    }
    return out;
}

std::vector<Bid> random_bids(const AuctionConfig& cfg, std::size_t n, Drbg& rng) {
    std::vector<Bid> bids;
    for (std::size_t j = 0; j < n; ++j) {
        Bid bid;
        bid.id = "b" + std::to_string(j + 1);
        for (std::size_t i = 0; i < cfg.m; ++i) bid.types.push_back({rng.between(0, cfg.max_quantity), rng.between(0, cfg.max_bid)});
        bids.push_back(std::move(bid));
    }
    return bids;
}

std::vector<Bid> parse_bids(const std::string& text, std::size_t m) {
    std::vector<Bid> bids;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split(line, ',');
        if (fields.size() != 1 + 2 * m)
            throw UsageError("bids line " + std::to_string(lineno) + ": expected " + std::to_string(1 + 2 * m) +
                             " fields, got " + std::to_string(fields.size()));
        Bid bid;
        bid.id = fields[0];
        const std::string where = "bids line " + std::to_string(lineno);
        for (std::size_t i = 0; i < m; ++i)
            bid.types.push_back({parse_u64(fields[1 + 2 * i], where), parse_u64(fields[2 + 2 * i], where)});
        bids.push_back(std::move(bid));
    }
    if (bids.empty()) throw UsageError("bid file lists no bidders");
    return bids;
}

std::vector<Bid> load_bids(const std::filesystem::path& path, std::size_t m) { return parse_bids(read_file(path), m); }

AuctionConfig parse_config(const std::string& text) {
    AuctionConfig cfg;
    std::vector<std::uint64_t> caps, weights;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    auto list = [](const std::string& v, const std::string& what) {
        std::vector<std::uint64_t> out;
        for (const auto& f : split(v, ',')) out.push_back(parse_u64(f, what));
        return out;
    };
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
        auto key = split(line.substr(0, eq), '\n').at(0);
        auto value = split(line.substr(eq + 1), '\n').at(0);
        const std::string where = "config key " + key;
        if (key == "m") cfg.m = parse_u64(value, where);
        else if (key == "capacities") caps = list(value, where);
        else if (key == "weights") weights = list(value, where);
        else if (key == "w") cfg.w = parse_u64(value, where);
        else if (key == "f") cfg.f = parse_u64(value, where);
        else if (key == "s") cfg.s = parse_u64(value, where);
        else if (key == "max_quantity") cfg.max_quantity = parse_u64(value, where);
        else if (key == "max_bid") cfg.max_bid = parse_u64(value, where);
        else throw UsageError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    cfg.capacities = caps.empty() ? std::vector<std::uint64_t>(cfg.m, 100) : caps;
    if (weights.empty()) {
        weights.resize(cfg.m);
        std::iota(weights.begin(), weights.end(), 1);
    }
    cfg.weights = weights;
    cfg.validate();
    return cfg;
}

AuctionConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

} // namespace dualgc::auction
