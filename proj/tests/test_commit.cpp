#include <gtest/gtest.h>

#include "dualgc/commit.hpp"
#include "dualgc/errors.hpp"

using namespace dualgc;
using namespace dualgc::commit;

TEST(Commit, KnownDigest) {
    // SHA-256 of 16 zero bytes followed by "abc", computed with an independent tool.
    Nonce n{};
    Bytes msg{'a', 'b', 'c'};
    auto c = commit::commit(msg, n);
    EXPECT_EQ(to_hex(c.digest), "277e7ff6d232b9763f4a66e8d05d210da32dac9c6dbce1026ad4cc98acb5fefe");
}

TEST(Commit, OpenAndTamper) {
    Drbg rng(7);
    Bytes payload{1, 2, 3, 4};
    auto [c, o] = commit_tagged(Context::InputSet, payload, rng);
    EXPECT_TRUE(verify(c, o));
    auto opened = open_tagged(c, o, Context::InputSet);
    ASSERT_TRUE(opened);
    EXPECT_EQ(*opened, payload);
    EXPECT_FALSE(open_tagged(c, o, Context::Position));

    auto bad = o;
    bad.message.back() ^= 1;
    EXPECT_FALSE(verify(c, bad));
    bad = o;
    bad.randomness[0] ^= 0x80;
    EXPECT_FALSE(verify(c, bad));
}

TEST(Commit, OpeningRoundTrip) {
    Drbg rng(3);
    auto [c, o] = commit_tagged(Context::OutputLabel, Bytes(40, 9), rng);
    ByteWriter w;
    write(w, o);
    auto bytes = w.take();
    ByteReader r(bytes);
    EXPECT_EQ(read_opening(r), o);
    EXPECT_TRUE(r.done());
    ByteReader truncated(ByteView(bytes).first(bytes.size() - 1));
    EXPECT_THROW(read_opening(truncated), FramingError);
}

TEST(Drbg, DeterministicAndSeparated) {
    Drbg a(42), b(42), c(43);
    auto x = a.bytes<32>();
    EXPECT_EQ(x, b.bytes<32>());
    EXPECT_NE(x, c.bytes<32>());
    Drbg d(42);
    EXPECT_NE(d.derive("one").bytes<16>(), d.derive("two").bytes<16>());
    for (int i = 0; i < 1000; ++i) {
        auto v = a.between(3, 9);
        EXPECT_GE(v, 3u);
        EXPECT_LE(v, 9u);
    }
}
