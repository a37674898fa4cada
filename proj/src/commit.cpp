#include "dualgc/commit.hpp"

namespace dualgc::commit {

Commitment commit(ByteView message, const Nonce& randomness) {
    return Commitment{sha256({ByteView(randomness), message})};
}

bool verify(const Commitment& c, const Opening& o) {
    return commit(o.message, o.randomness) == c;
}

Bytes tagged(Context ctx, ByteView payload) {
    Bytes msg;
    msg.reserve(payload.size() + 1);
    msg.push_back(static_cast<std::uint8_t>(ctx));
    msg.insert(msg.end(), payload.begin(), payload.end());
    return msg;
}

Committed commit_tagged(Context ctx, ByteView payload, Drbg& rng) {
    Opening o{tagged(ctx, payload), rng.bytes<16>()};
    auto c = commit(o.message, o.randomness);
    return {c, std::move(o)};
}

std::optional<Bytes> open_tagged(const Commitment& c, const Opening& o, Context ctx) {
    if (o.message.empty() || o.message.front() != static_cast<std::uint8_t>(ctx)) return std::nullopt;
    if (!verify(c, o)) return std::nullopt;
    return Bytes(o.message.begin() + 1, o.message.end());
}

void write(ByteWriter& w, const Opening& o) {
    w.blob(o.message);
    w.raw(o.randomness);
}

Opening read_opening(ByteReader& r) {
    Opening o;
    o.message = r.blob();
    o.randomness = r.fixed<16>();
    return o;
}

} // namespace dualgc::commit
