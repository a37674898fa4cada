#pragma once

// Message transports. Frames travel on per-(sender, receiver) FIFO channels.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dualgc/bytes.hpp"
#include "dualgc/messages.hpp"

namespace dualgc::session {

class Transport {
public:
    virtual ~Transport() = default;
    virtual void send(RoleId from, RoleId to, Bytes framed) = 0;
    // Next frame on the channel. Throws TransportError when none arrives in time.
    virtual Bytes recv(RoleId to, RoleId from) = 0;
    // Waits until every frame sent so far has been delivered.
    virtual void sync() = 0;
    // Next frame on the channel if one has been delivered.
    virtual std::optional<Bytes> try_recv(RoleId to, RoleId from) = 0;
    // Waits for frames in flight, then drops everything undelivered.
    virtual void reset() = 0;
};

// Channel queues shared by both transports.
class Mailbox {
public:
    void push(RoleId to, RoleId from, Bytes framed);
    std::optional<Bytes> pop(RoleId to, RoleId from, std::optional<std::chrono::milliseconds> wait);
    std::uint64_t delivered() const;
    bool wait_delivered(std::uint64_t count, std::chrono::milliseconds wait);
    void clear();

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::map<std::pair<RoleId, RoleId>, std::deque<Bytes>> queues_;
    std::uint64_t delivered_ = 0;
};

// All roles in one process; delivery is immediate.
class InProcessTransport final : public Transport {
public:
    void send(RoleId from, RoleId to, Bytes framed) override;
    Bytes recv(RoleId to, RoleId from) override;
    void sync() override {}
    std::optional<Bytes> try_recv(RoleId to, RoleId from) override;
    void reset() override { box_.clear(); }

private:
    Mailbox box_;
};

// Every role holds its own TCP connection to a hub listening on host:port
// (port 0 picks a free one). Frames are prefixed with a u16 sender and u16
// receiver; the hub forwards them to the receiver's connection, where a
// reader thread files them into channel queues.
class TcpTransport final : public Transport {
public:
    TcpTransport(const std::string& host, std::uint16_t port, std::size_t roles,
                 std::chrono::milliseconds timeout = std::chrono::seconds(30));
    ~TcpTransport() override;
    TcpTransport(const TcpTransport&) = delete;
    TcpTransport& operator=(const TcpTransport&) = delete;

    void send(RoleId from, RoleId to, Bytes framed) override;
    Bytes recv(RoleId to, RoleId from) override;
    void sync() override;
    std::optional<Bytes> try_recv(RoleId to, RoleId from) override;
    void reset() override;
    std::uint16_t port() const { return port_; }

private:
    void hub_loop(std::size_t conn);
    void reader_loop(std::size_t role);

    std::chrono::milliseconds timeout_;
    std::uint16_t port_ = 0;
    int listener_ = -1;
    std::vector<int> hub_side_;     // indexed by role
    std::vector<int> role_side_;    // indexed by role
    std::vector<std::unique_ptr<std::mutex>> write_mu_;
    std::vector<std::thread> threads_;
    Mailbox box_;
    std::uint64_t sent_ = 0;
    std::mutex error_mu_;
    std::string error_;
};

// "host:port" -> (host, port). Throws UsageError.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& spec);

} // namespace dualgc::session
