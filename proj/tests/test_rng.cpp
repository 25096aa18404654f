#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "seqsize/rng.hpp"

using namespace seqsize;

TEST_SUITE_BEGIN("rng");

// Known-answer vectors from the Random123 reference distribution.
TEST_CASE("philox4x32-10 known answers") {
    {
        philox::Counter ctr{0, 0, 0, 0};
        philox::Key key{0, 0};
        const philox::Counter out = philox::block(ctr, key);
        CHECK(out == philox::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    }
    {
        philox::Counter ctr{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu};
        philox::Key key{0xffffffffu, 0xffffffffu};
        const philox::Counter out = philox::block(ctr, key);
        CHECK(out == philox::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    }
    {
        philox::Counter ctr{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u};
        philox::Key key{0xa4093822u, 0x299f31d0u};
        const philox::Counter out = philox::block(ctr, key);
        CHECK(out == philox::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
    }
}

TEST_CASE("streams are reproducible and substream derivation is stateless") {
    RngStream a(42);
    RngStream b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    // deriving children does not consume parent state
    RngStream parent(7);
    const std::uint64_t before = RngStream(7).next_u64();
    (void)parent.derive(StreamPurpose::Replicate, 3);
    CHECK(parent.next_u64() == before);

    // children with distinct indices differ, same index matches
    RngStream c1 = parent.derive(StreamPurpose::Replicate, 1);
    RngStream c2 = parent.derive(StreamPurpose::Replicate, 2);
    RngStream c1b = parent.derive(StreamPurpose::Replicate, 1);
    CHECK(c1.next_u64() != c2.next_u64());
    CHECK(RngStream(7).derive(StreamPurpose::Replicate, 1).next_u64() == c1b.next_u64());
}

TEST_CASE("uniform01 lies in [0,1) and has a sane mean") {
    RngStream s(123);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("uniform_below is unbiased across a small range") {
    RngStream s(99);
    std::array<long, 7> counts{};
    const long n = 140000;
    for (long i = 0; i < n; ++i) ++counts[s.uniform_below(7)];
    for (long c : counts) CHECK(std::abs(static_cast<double>(c) / n - 1.0 / 7) < 0.01);
}

TEST_CASE("normal moments") {
    RngStream s(2024);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        sum += z;
        sumsq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sumsq / n - 1.0) < 0.02);
}

TEST_SUITE_END();
