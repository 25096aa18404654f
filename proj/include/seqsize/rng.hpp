#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace seqsize {

// Philox4x32-10 block cipher (Salmon et al., SC 2011). Counter-based: the
// stream is a pure function of (key, counter), so independent substreams can
// be handed to parallel workers without any shared state.
namespace philox {

inline constexpr std::uint32_t kM0 = 0xD2511F53u;
inline constexpr std::uint32_t kM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kW1 = 0xBB67AE85u;

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter round_once(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
            static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
            static_cast<std::uint32_t>(p0)};
}

inline Counter block(Counter c, Key k) {
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k[0] += kW0;
            k[1] += kW1;
        }
        c = round_once(c, k);
    }
    return c;
}

}  // namespace philox

// 64-bit finalizer used to derive substream identifiers from path components.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Purpose tags for substream derivation. Values are part of the
// reproducibility contract: changing them changes every stream.
enum class StreamPurpose : std::uint64_t {
    Develop = 1,
    Replicate = 2,
    Stage = 3,
    Row = 4,
    Permutation = 5,
    Folds = 6,
    InnerBootstrap = 7,
    Calibrate = 8,
    MonteCarlo = 9,
};

// A deterministic random stream: Philox keyed by the root seed, with a
// 64-bit stream id in the upper counter words and a draw counter below.
// derive() mints child streams from (purpose, index) without consuming
// state, so the draw sequence of any stream depends only on its path from
// the root seed, never on evaluation order or thread count.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_id_(stream_id) {}

    RngStream derive(StreamPurpose purpose, std::uint64_t index) const {
        std::uint64_t child = mix64(stream_id_ ^ mix64(static_cast<std::uint64_t>(purpose)) ^
                                    mix64(mix64(index) + 0x632BE59BD9B4E019ull));
        std::uint64_t seed = (static_cast<std::uint64_t>(key_[1]) << 32) | key_[0];
        return RngStream(seed, child);
    }

    std::uint32_t next_u32() {
        if (block_pos_ == 4) refill();
        return block_[block_pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        const std::uint64_t lo = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Unbiased integer on [0, n) by rejection.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t limit = n * (~std::uint64_t{0} / n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller (cosine branch).
    double normal() {
        const double u1 = 1.0 - uniform01();  // (0,1], keeps log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    std::uint64_t stream_id() const { return stream_id_; }

private:
    void refill() {
        philox::Counter c{static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                          static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
        block_ = philox::block(c, key_);
        ++counter_;
        block_pos_ = 0;
    }

    philox::Key key_;
    std::uint64_t stream_id_ = 0;
    std::uint64_t counter_ = 0;
    philox::Counter block_{};
    int block_pos_ = 4;
};

}  // namespace seqsize
