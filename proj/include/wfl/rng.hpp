#pragma once

// Counter-based random number generation (Philox4x32-10).
//
// Every draw is a pure function of (seed, stream, index), so results are
// bit-identical regardless of execution order, chunking, or thread count.
// This is the backbone of the reproducibility contract: any component that
// needs randomness derives a stream id from its logical coordinates
// (purpose, round, client, frame, ...) and indexes draws within it.

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>

namespace wfl {

namespace detail {

inline void philox_mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                           std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace detail

struct PhiloxBlock {
    std::array<std::uint32_t, 4> w;
};

// One 128-bit block from key (seed) and 128-bit counter.
inline PhiloxBlock philox4x32(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t index) {
    constexpr std::uint32_t kMulA = 0xD2511F53u;
    constexpr std::uint32_t kMulB = 0xCD9E8D57u;
    constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    constexpr std::uint32_t kWeylB = 0xBB67AE85u;

    std::uint32_t c0 = static_cast<std::uint32_t>(index);
    std::uint32_t c1 = static_cast<std::uint32_t>(index >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(stream);
    std::uint32_t c3 = static_cast<std::uint32_t>(stream >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);

    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        detail::philox_mulhilo(kMulA, c0, hi0, lo0);
        detail::philox_mulhilo(kMulB, c2, hi1, lo1);
        std::uint32_t n0 = hi1 ^ c1 ^ k0;
        std::uint32_t n1 = lo1;
        std::uint32_t n2 = hi0 ^ c3 ^ k1;
        std::uint32_t n3 = lo0;
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        k0 += kWeylA;
        k1 += kWeylB;
    }
    return PhiloxBlock{{c0, c1, c2, c3}};
}

// Raw Philox with explicit 4x32 counter and 2x32 key, used by the
// known-answer tests against the published vectors.
inline PhiloxBlock philox4x32_raw(const std::array<std::uint32_t, 4>& ctr,
                                  const std::array<std::uint32_t, 2>& key) {
    std::uint64_t stream =
        (static_cast<std::uint64_t>(ctr[3]) << 32) | ctr[2];
    std::uint64_t index = (static_cast<std::uint64_t>(ctr[1]) << 32) | ctr[0];
    std::uint64_t seed = (static_cast<std::uint64_t>(key[1]) << 32) | key[0];
    return philox4x32(seed, stream, index);
}

inline std::uint64_t draw_u64(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t index) {
    PhiloxBlock b = philox4x32(seed, stream, index);
    return (static_cast<std::uint64_t>(b.w[0]) << 32) | b.w[1];
}

// Uniform double in (0, 1]; never returns 0 so it is safe under log().
inline double u64_to_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

inline double draw_unit(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t index) {
    return u64_to_unit(draw_u64(seed, stream, index));
}

// One standard normal per index (Box-Muller, cosine branch). Both uniforms
// come from the same Philox block, so a single evaluation suffices.
inline double draw_normal(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index) {
    PhiloxBlock b = philox4x32(seed, stream, index);
    std::uint64_t a = (static_cast<std::uint64_t>(b.w[0]) << 32) | b.w[1];
    std::uint64_t c = (static_cast<std::uint64_t>(b.w[2]) << 32) | b.w[3];
    double u1 = u64_to_unit(a);
    double u2 = u64_to_unit(c);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Unbiased integer in [0, n) via 128-bit multiply-shift.
inline std::uint64_t draw_below(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t index, std::uint64_t n) {
    assert(n > 0);
    unsigned __int128 wide =
        static_cast<unsigned __int128>(draw_u64(seed, stream, index)) * n;
    return static_cast<std::uint64_t>(wide >> 64);
}

// Logical stream coordinates. Purposes keep unrelated draw families apart;
// the (a, b, c) fields carry round/client/frame-style indices.
enum class StreamPurpose : std::uint64_t {
    ChannelNoise = 1,
    ChannelInfoBits = 2,
    CalibInfoBits = 3,
    CalibNoise = 4,
    ErrorInject = 5,
    DatasetCenters = 6,
    DatasetSamples = 7,
    DatasetShuffle = 8,
    SgdBatch = 9,
    ModelInit = 10,
    PartitionShuffle = 11,
    CodeConstruct = 12,
    ValidationMc = 13,
};

inline std::uint64_t make_stream(StreamPurpose purpose, std::uint64_t a = 0,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    assert(a < (1ull << 18));
    assert(b < (1ull << 16));
    assert(c < (1ull << 24));
    return (static_cast<std::uint64_t>(purpose) << 58) | (a << 40) | (b << 24) |
           c;
}

}  // namespace wfl
