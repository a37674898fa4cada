#include "dualgc/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "dualgc/errors.hpp"

namespace dualgc::session {

void Mailbox::push(RoleId to, RoleId from, Bytes framed) {
    {
        std::lock_guard lock(mu_);
        queues_[{to, from}].push_back(std::move(framed));
        ++delivered_;
    }
    cv_.notify_all();
}

std::optional<Bytes> Mailbox::pop(RoleId to, RoleId from, std::optional<std::chrono::milliseconds> wait) {
    std::unique_lock lock(mu_);
    auto ready = [&] {
        auto it = queues_.find({to, from});
        return it != queues_.end() && !it->second.empty();
    };
    if (wait && !ready()) cv_.wait_for(lock, *wait, ready);
    if (!ready()) return std::nullopt;
    auto& q = queues_[{to, from}];
    Bytes out = std::move(q.front());
    q.pop_front();
    return out;
}

std::uint64_t Mailbox::delivered() const {
    std::lock_guard lock(mu_);
    return delivered_;
}

bool Mailbox::wait_delivered(std::uint64_t count, std::chrono::milliseconds wait) {
    std::unique_lock lock(mu_);
    return cv_.wait_for(lock, wait, [&] { return delivered_ >= count; });
}

void Mailbox::clear() {
    std::lock_guard lock(mu_);
    queues_.clear();
}

void InProcessTransport::send(RoleId from, RoleId to, Bytes framed) { box_.push(to, from, std::move(framed)); }

Bytes InProcessTransport::recv(RoleId to, RoleId from) {
    // Everything runs on one thread here, so an empty channel never fills.
    auto f = box_.pop(to, from, std::nullopt);
    if (!f) throw TransportError("no message from " + role_name(from) + " to " + role_name(to));
    return std::move(*f);
}

std::optional<Bytes> InProcessTransport::try_recv(RoleId to, RoleId from) { return box_.pop(to, from, std::nullopt); }

namespace {

void write_all(int fd, const std::uint8_t* data, std::size_t n) {
    while (n > 0) {
        auto w = ::send(fd, data, n, MSG_NOSIGNAL);
        if (w < 0 && errno == EINTR) continue;
        if (w <= 0) throw TransportError(std::string("socket write failed: ") + std::strerror(errno));
        data += w;
        n -= static_cast<std::size_t>(w);
    }
}

// False on clean end of stream before any byte.
bool read_all(int fd, std::uint8_t* data, std::size_t n) {
    std::size_t got = 0;
    while (got < n) {
        auto r = ::recv(fd, data + got, n - got, 0);
        if (r < 0 && errno == EINTR) continue;
        if (r == 0 && got == 0) return false;
        if (r <= 0) throw TransportError("connection closed mid-frame");
        got += static_cast<std::size_t>(r);
    }
    return true;
}

// Reads route prefix and frame. nullopt at end of stream.
std::optional<std::pair<std::array<std::uint8_t, 4>, Bytes>> read_routed(int fd) {
    std::array<std::uint8_t, 4> route{};
    if (!read_all(fd, route.data(), 4)) return std::nullopt;
    std::array<std::uint8_t, 4> len{};
    if (!read_all(fd, len.data(), 4)) throw TransportError("connection closed mid-frame");
    auto total = frame_length(len);
    if (total < kFrameOverhead) throw TransportError("bad frame length on the wire");
    Bytes framed(total);
    std::copy(len.begin(), len.end(), framed.begin());
    if (total > 4 && !read_all(fd, framed.data() + 4, total - 4)) throw TransportError("connection closed mid-frame");
    return std::make_pair(route, std::move(framed));
}

int connect_to(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
        throw TransportError("cannot resolve " + host);
    int fd = -1;
    for (auto* a = res; a; a = a->ai_next) {
        fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    freeaddrinfo(res);
    if (fd < 0) throw TransportError("cannot connect to " + host + ":" + std::to_string(port));
    int one = 1;
    setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return fd;
}

} // namespace

TcpTransport::TcpTransport(const std::string& host, std::uint16_t port, std::size_t roles,
                           std::chrono::milliseconds timeout)
    : timeout_(timeout), hub_side_(roles, -1), role_side_(roles, -1) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
        throw TransportError("cannot resolve " + host);
    listener_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    int one = 1;
    setsockopt(listener_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (listener_ < 0 || ::bind(listener_, res->ai_addr, res->ai_addrlen) != 0 ||
        ::listen(listener_, static_cast<int>(roles)) != 0) {
        freeaddrinfo(res);
        if (listener_ >= 0) ::close(listener_);
        throw TransportError("cannot listen on " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
    }
    freeaddrinfo(res);
    sockaddr_storage bound{};
    socklen_t blen = sizeof bound;
    getsockname(listener_, reinterpret_cast<sockaddr*>(&bound), &blen);
    port_ = ntohs(bound.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port
                                              : reinterpret_cast<sockaddr_in*>(&bound)->sin_port);

    for (std::size_t r = 0; r < roles; ++r) {
        write_mu_.push_back(std::make_unique<std::mutex>());
        role_side_[r] = connect_to(host, port_);
        int fd = ::accept(listener_, nullptr, nullptr);
        if (fd < 0) throw TransportError("accept failed");
        setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        hub_side_[r] = fd;
    }
    for (std::size_t r = 0; r < roles; ++r) {
        threads_.emplace_back([this, r] { hub_loop(r); });
        threads_.emplace_back([this, r] { reader_loop(r); });
    }
}

TcpTransport::~TcpTransport() {
    for (int fd : role_side_)
        if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
    for (int fd : hub_side_)
        if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
    for (auto& t : threads_) t.join();
    for (int fd : role_side_)
        if (fd >= 0) ::close(fd);
    for (int fd : hub_side_)
        if (fd >= 0) ::close(fd);
    if (listener_ >= 0) ::close(listener_);
}

void TcpTransport::hub_loop(std::size_t conn) {
    try {
        while (auto msg = read_routed(hub_side_[conn])) {
            auto& [route, framed] = *msg;
            std::size_t to = (static_cast<std::size_t>(route[2]) << 8) | route[3];
            if (to >= hub_side_.size()) throw TransportError("frame routed to unknown role");
            std::lock_guard lock(*write_mu_[to]);
            write_all(hub_side_[to], route.data(), route.size());
            write_all(hub_side_[to], framed.data(), framed.size());
        }
    } catch (const std::exception& e) {
        std::lock_guard lock(error_mu_);
        if (error_.empty()) error_ = e.what();
    }
}

void TcpTransport::reader_loop(std::size_t role) {
    try {
        while (auto msg = read_routed(role_side_[role])) {
            auto& [route, framed] = *msg;
            RoleId from = (route[0] << 8) | route[1];
            box_.push(static_cast<RoleId>(role), from, std::move(framed));
        }
    } catch (const std::exception& e) {
        std::lock_guard lock(error_mu_);
        if (error_.empty()) error_ = e.what();
    }
}

void TcpTransport::send(RoleId from, RoleId to, Bytes framed) {
    if (from < 0 || to < 0 || static_cast<std::size_t>(from) >= role_side_.size() ||
        static_cast<std::size_t>(to) >= role_side_.size())
        throw TransportError("send between unknown roles");
    std::array<std::uint8_t, 4> route{static_cast<std::uint8_t>(from >> 8), static_cast<std::uint8_t>(from),
                                      static_cast<std::uint8_t>(to >> 8), static_cast<std::uint8_t>(to)};
    write_all(role_side_[static_cast<std::size_t>(from)], route.data(), route.size());
    write_all(role_side_[static_cast<std::size_t>(from)], framed.data(), framed.size());
    ++sent_;
}

Bytes TcpTransport::recv(RoleId to, RoleId from) {
    auto f = box_.pop(to, from, timeout_);
    if (!f) {
        std::lock_guard lock(error_mu_);
        throw TransportError("timeout: " + role_name(from) + " silent towards " + role_name(to) +
                             (error_.empty() ? "" : " (" + error_ + ")"));
    }
    return std::move(*f);
}

void TcpTransport::sync() {
    if (!box_.wait_delivered(sent_, timeout_)) throw TransportError("timeout waiting for frames in flight");
}

void TcpTransport::reset() {
    sync();
    box_.clear();
}

std::optional<Bytes> TcpTransport::try_recv(RoleId to, RoleId from) { return box_.pop(to, from, std::nullopt); }

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& spec) {
    auto colon = spec.rfind(':');
    if (colon == std::string::npos || colon == 0) throw UsageError("expected host:port, got '" + spec + "'");
    auto host = spec.substr(0, colon);
    auto port_text = spec.substr(colon + 1);
    unsigned long port = 0;
    try {
        std::size_t used = 0;
        port = std::stoul(port_text, &used);
        if (used != port_text.size()) throw std::invalid_argument(port_text);
    } catch (const std::exception&) {
        throw UsageError("bad port in '" + spec + "'");
    }
    if (port > 65535) throw UsageError("port out of range in '" + spec + "'");
    return {host, static_cast<std::uint16_t>(port)};
}

} // namespace dualgc::session
