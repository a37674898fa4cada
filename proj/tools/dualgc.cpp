// Command-line harness: demo auctions, scaling benchmarks, adversary sweeps
// and circuit dumps.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "dualgc/auction.hpp"
#include "dualgc/circuit.hpp"
#include "dualgc/errors.hpp"
#include "dualgc/session.hpp"

using namespace dualgc;

namespace {

struct Common {
    std::size_t bidders = 6;
    std::size_t types = 6;
    std::uint64_t capacity = 10;
    std::size_t copies = 10;
    std::size_t bits = 16;
    std::uint64_t seed = 1;
    std::uint64_t max_quantity = 3;
    std::uint64_t max_bid = 100;
    std::string config_file;
    std::string tcp;
    std::string out;
};

void add_auction_flags(CLI::App* app, Common& c, bool single_point) {
    if (single_point) {
        app->add_option("--bidders,-n", c.bidders, "number of bidders")->capture_default_str();
        app->add_option("--vm-types,-m", c.types, "number of VM types")->capture_default_str();
        app->add_option("--capacity,-k", c.capacity, "instances per VM type")->capture_default_str();
    }
    app->add_option("--copies,-s", c.copies, "cut-and-choose copies per input wire")->capture_default_str();
    app->add_option("--bits,-w", c.bits, "bit width of quantities and bids")->capture_default_str();
    app->add_option("--seed", c.seed, "session seed")->capture_default_str();
    app->add_option("--max-quantity", c.max_quantity, "upper end of random quantities")->capture_default_str();
    app->add_option("--max-bid", c.max_bid, "upper end of random bids")->capture_default_str();
    app->add_option("--config", c.config_file, "auction config file (key=value lines)");
    app->add_option("--tcp", c.tcp, "run roles over TCP through a hub on host:port");
}

auction::AuctionConfig make_config(const Common& c, std::size_t types, std::uint64_t capacity) {
    auction::AuctionConfig cfg = c.config_file.empty() ? auction::AuctionConfig::uniform(types, capacity)
                                                       : auction::load_config(c.config_file);
    if (c.config_file.empty()) {
        cfg.w = c.bits;
        cfg.s = c.copies;
        cfg.max_quantity = c.max_quantity;
        cfg.max_bid = c.max_bid;
    }
    cfg.validate();
    return cfg;
}

// One transport per session so an aborted run cannot leak into the next.
std::unique_ptr<session::Transport> make_transport(const Common& c, std::size_t providers) {
    if (c.tcp.empty()) return nullptr;
    auto [host, port] = session::parse_endpoint(c.tcp);
    return std::make_unique<session::TcpTransport>(host, port, 2 + providers);
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw UsageError("cannot write " + path);
    return file;
}

std::vector<std::uint64_t> parse_list(const std::string& text, const char* what) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            auto v = std::stoull(item, &used);
            if (used != item.size() || v == 0) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError(std::string("bad value '") + item + "' in " + what);
        }
    }
    if (out.empty()) throw UsageError(std::string("empty ") + what);
    return out;
}

std::string payment_text(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << v;
    return s.str();
}

// --- demo -----------------------------------------------------------------------------

int demo(const Common& c, const std::string& bids_file) {
    auto cfg = make_config(c, c.types, c.capacity);
    std::vector<auction::Bid> bids;
    if (!bids_file.empty()) {
        bids = auction::load_bids(bids_file, cfg.m);
    } else {
        Drbg rng = Drbg(c.seed).derive("bids");
        bids = auction::random_bids(cfg, c.bidders, rng);
    }
    if (bids.empty()) throw UsageError("no bidders");
    auto handle = session::make_handle(auction::build_auction_circuit(cfg, bids.size()));
    auto transport = make_transport(c, bids.size() + 1);
    session::SessionOptions opt;
    opt.s = c.copies;
    opt.seed = c.seed;
    opt.transport = transport.get();
    auto r = session::run_session(cfg, handle, bids, opt);

    std::cout << "bidders " << bids.size() << ", VM types " << cfg.m << ", copies " << opt.s << ", gates "
              << handle.circuit->gates.size() << "\n";
    if (!r.outcome) {
        std::cout << "session did not complete: " << r.session.detail << "\n";
        return 1;
    }
    std::cout << "winners:";
    for (std::size_t j = 0; j < bids.size(); ++j)
        if (r.outcome->allocation[j]) std::cout << ' ' << bids[j].id;
    std::cout << "\n";
    for (std::size_t j = 0; j < bids.size(); ++j)
        std::cout << "  " << bids[j].id << "  x=" << int(r.outcome->allocation[j])
                  << "  payment=" << payment_text(r.outcome->payment(j)) << "\n";
    auto m = session::measure(r.session.transcript);
    std::cout << "bytes " << m.bytes_total << " (phase 1 " << m.bytes_by_phase[0] << ", phase 2 " << m.bytes_by_phase[1]
              << ", phase 3 " << m.bytes_by_phase[2] << ")\n";
    std::cout << "matches plaintext mechanism: " << (r.matches_oracle ? "yes" : "no") << "\n";
    if (!c.out.empty()) {
        std::ofstream f;
        open_out(c.out, f) << r.session.transcript.to_csv();
    }
    return r.matches_oracle ? 0 : 1;
}

// --- bench ----------------------------------------------------------------------------

int bench(const Common& c, const std::string& ns, const std::string& ms, const std::string& ks) {
    auto n_list = parse_list(ns, "--bidders");
    auto m_list = parse_list(ms, "--vm-types");
    auto k_list = parse_list(ks, "--capacity");
    std::ofstream file;
    auto& out = open_out(c.out, file);
    out << "n,m,k,time_seconds,bytes\n";
    for (auto n : n_list)
        for (auto m : m_list)
            for (auto k : k_list) {
                auto cfg = make_config(c, m, k);
                if (!c.config_file.empty()) {
                    cfg.m = m;
                    cfg.capacities.assign(m, k);
                    cfg.weights.resize(m);
                    for (std::size_t i = 0; i < m; ++i) cfg.weights[i] = i + 1;
                    cfg.validate();
                }
                Drbg rng = Drbg(c.seed).derive("bids");
                auto bids = auction::random_bids(cfg, n, rng);
                auto handle = session::make_handle(auction::build_auction_circuit(cfg, n));
                auto transport = make_transport(c, n + 1);
                session::SessionOptions opt;
                opt.s = c.copies;
                opt.seed = c.seed;
                opt.transport = transport.get();
                auto t0 = std::chrono::steady_clock::now();
                auto r = session::run_session(cfg, handle, bids, opt);
                double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                if (!r.matches_oracle) throw ProtocolError("benchmark session disagrees with the plaintext mechanism");
                out << n << ',' << m << ',' << k << ',' << std::fixed << std::setprecision(3) << secs << ','
                    << r.session.transcript.total_bytes() << '\n';
                out.flush();
            }
    return 0;
}

// --- attack ---------------------------------------------------------------------------

int attack(const Common& c, const std::string& name, std::size_t trials) {
    if (name != "none" && std::find(session::adversary_names().begin(), session::adversary_names().end(), name) ==
                              session::adversary_names().end())
        throw UsageError("unknown adversary '" + name + "'");
    if (trials == 0) throw UsageError("--trials must be positive");
    auto cfg = make_config(c, c.types, c.capacity);
    auto handle = session::make_handle(auction::build_auction_circuit(cfg, c.bidders));

    std::size_t detected = 0, correct = 0, silent = 0, accepted = 0;
    std::map<std::string, std::size_t> phases;
    std::ofstream file;
    std::ostream* rows = nullptr;
    if (!c.out.empty()) {
        rows = &open_out(c.out, file);
        *rows << "trial,adversary,target,detected,abort_phase,verdict_correct,silent_wrong\n";
    }
    for (std::size_t t = 0; t < trials; ++t) {
        std::uint64_t seed = c.seed + t;
        Drbg rng = Drbg(seed).derive("attack");
        auto bids = auction::random_bids(cfg, c.bidders, rng);
        std::optional<session::AdversaryScript> script;
        if (name != "none") script = session::make_adversary(name, *handle.circuit, c.copies, rng);
        auto transport = make_transport(c, c.bidders + 1);
        session::SessionOptions opt;
        opt.s = c.copies;
        opt.seed = seed;
        opt.adversary = script;
        opt.transport = transport.get();
        auto r = session::run_session(cfg, handle, bids, opt).session;

        session::Assessment a;
        if (script) {
            a = session::assess(*script, *handle.circuit, r);
        } else {
            a.detected = r.detected();
            a.verdict_correct = r.identified().empty();
            a.silent_wrong = r.silent_wrong_acceptances();
        }
        detected += a.detected;
        correct += a.verdict_correct;
        silent += a.silent_wrong;
        accepted += r.all_accept();
        std::string phase = r.aborted() ? "phase " + std::to_string(static_cast<int>(*r.abort_phase)) : "completed";
        ++phases[phase];
        if (rows)
            *rows << t << ',' << name << ',' << (script ? session::role_name(script->target()) : "-") << ','
                  << a.detected << ',' << (r.aborted() ? static_cast<int>(*r.abort_phase) : 0) << ','
                  << a.verdict_correct << ',' << a.silent_wrong << '\n';
    }

    auto pct = [&](std::size_t x) { return 100.0 * static_cast<double>(x) / static_cast<double>(trials); };
    std::cout << "adversary " << name << ", trials " << trials << ", copies " << c.copies << "\n";
    std::cout << std::fixed << std::setprecision(2);
    std::cout << "detection rate      " << pct(detected) << "%\n";
    std::cout << "verdict correct     " << pct(correct) << "%\n";
    std::cout << "all providers accept " << pct(accepted) << "%\n";
    std::cout << "silent wrong outputs " << silent << "\n";
    for (const auto& [phase, count] : phases) std::cout << "  " << phase << ": " << count << "\n";
    return silent == 0 ? 0 : 1;
}

// --- dump-circuit ---------------------------------------------------------------------

int dump_circuit(const Common& c) {
    auto cfg = make_config(c, c.types, c.capacity);
    auto circuit = auction::build_auction_circuit(cfg, c.bidders);
    std::ofstream f;
    open_out(c.out, f) << circuit::to_netlist(circuit);
    std::cerr << "gates " << circuit.gates.size() << ", wires " << circuit.wire_count << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secure cloud auction with two garbling parties and verifiable outputs"};
    app.require_subcommand(1);

    Common demo_opts, bench_opts, attack_opts, dump_opts;
    std::string bids_file, adversary = "none";
    std::string n_grid = "4,8,16,32", m_grid = "2,4,6", k_grid = "100";
    std::size_t trials = 100;
    bool full_scale = false;

    auto* d = app.add_subcommand("demo", "run one auction session and print winners and payments");
    add_auction_flags(d, demo_opts, true);
    d->add_option("--bids-file", bids_file, "bids, one line per bidder: id, q1, b1, ..., qm, bm");
    d->add_option("--out", demo_opts.out, "write the transcript as CSV");

    auto* b = app.add_subcommand("bench", "sweep a parameter grid, one session per point");
    add_auction_flags(b, bench_opts, false);
    b->add_option("--bidders,-n", n_grid, "comma list of bidder counts")->capture_default_str();
    b->add_option("--vm-types,-m", m_grid, "comma list of VM type counts")->capture_default_str();
    b->add_option("--capacity,-k", k_grid, "comma list of per-type capacities")->capture_default_str();
    b->add_option("--out", bench_opts.out, "CSV destination (stdout by default)");
    b->add_flag("--full-scale", full_scale, "use bidder counts 50..300 instead of the desk-scale grid");

    auto* a = app.add_subcommand("attack", "run seeded sessions against one adversary behaviour");
    attack_opts.bidders = 3;
    attack_opts.types = 1;
    add_auction_flags(a, attack_opts, true);
    a->add_option("--adversary", adversary, "behaviour name, or none")->capture_default_str();
    a->add_option("--trials", trials, "number of seeded sessions")->capture_default_str();
    a->add_option("--out", attack_opts.out, "per-trial CSV");

    auto* dc = app.add_subcommand("dump-circuit", "write the auction circuit as a netlist");
    add_auction_flags(dc, dump_opts, true);
    dc->add_option("--out", dump_opts.out, "netlist destination (stdout by default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (d->parsed()) return demo(demo_opts, bids_file);
        if (b->parsed()) {
            if (full_scale && b->count("--bidders") == 0) n_grid = "50,100,150,200,250,300";
            return bench(bench_opts, n_grid, m_grid, k_grid);
        }
        if (a->parsed()) return attack(attack_opts, adversary, trials);
        if (dc->parsed()) return dump_circuit(dump_opts);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
