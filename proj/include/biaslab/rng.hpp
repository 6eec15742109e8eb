#pragma once

// Counter-based random numbers.
//
// Every draw is a pure function of (key, counter), so a row of simulated
// data can be produced by any thread in any order and still come out
// bit-identical.  The block function is Philox4x32-10 (Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3", SC'11).

#include <array>
#include <cstdint>

#include <boost/random/normal_distribution.hpp>

namespace biaslab::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter philox4x32_10(Counter ctr, Key key) noexcept {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
               static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
               static_cast<std::uint32_t>(p0)};
    }
    return ctr;
}

/// Two independent blocks in lockstep; same output as two separate calls,
/// but the multiply chains overlap.
inline std::array<Counter, 2> philox4x32_10_pair(Counter a, Counter b, Key key) noexcept {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        const std::uint64_t a0 = std::uint64_t{kMul0} * a[0], a1 = std::uint64_t{kMul1} * a[2];
        const std::uint64_t b0 = std::uint64_t{kMul0} * b[0], b1 = std::uint64_t{kMul1} * b[2];
        a = {static_cast<std::uint32_t>(a1 >> 32) ^ a[1] ^ key[0], static_cast<std::uint32_t>(a1),
             static_cast<std::uint32_t>(a0 >> 32) ^ a[3] ^ key[1], static_cast<std::uint32_t>(a0)};
        b = {static_cast<std::uint32_t>(b1 >> 32) ^ b[1] ^ key[0], static_cast<std::uint32_t>(b1),
             static_cast<std::uint32_t>(b0 >> 32) ^ b[3] ^ key[1], static_cast<std::uint32_t>(b0)};
    }
    return {a, b};
}

/// SplitMix64 finalizer; used only to turn (seed, stream) pairs into keys.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Independent stream for (master seed, stream index), e.g. one per
/// Monte Carlo replication or bootstrap resample.
constexpr Key stream_key(std::uint64_t seed, std::uint64_t stream) noexcept {
    const std::uint64_t k = mix64(mix64(seed) ^ (stream * 0xD1B54A32D192ED03ull + 1));
    return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

/// Two 64-bit words for (row, slot).  Slot distinguishes draws within a row.
struct Words {
    std::uint64_t a;
    std::uint64_t b;
};

inline Words to_words(const Counter& out) noexcept {
    return {(std::uint64_t{out[1]} << 32) | out[0], (std::uint64_t{out[3]} << 32) | out[2]};
}

inline Words draw(Key key, std::uint64_t row, std::uint32_t slot) noexcept {
    return to_words(philox4x32_10({static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(row >> 32), slot, 0u}, key));
}

/// Slots `slot` and `slot + 1` at once.
inline std::array<Words, 2> draw_pair(Key key, std::uint64_t row, std::uint32_t slot) noexcept {
    const auto lo = static_cast<std::uint32_t>(row), hi = static_cast<std::uint32_t>(row >> 32);
    const auto out = philox4x32_10_pair({lo, hi, slot, 0u}, {lo, hi, slot + 1, 0u}, key);
    return {to_words(out[0]), to_words(out[1])};
}

/// Uniform on the open interval (0, 1).  52 bits plus a half-step offset
/// keeps the largest value at 1 - 2^-53, which is representable.
constexpr double to_unit_open(std::uint64_t w) noexcept {
    return (static_cast<double>(w >> 12) + 0.5) * 0x1.0p-52;
}

/// Uniform integer in [0, n) by multiply-shift (bias below 2^-32 for n < 2^32).
inline std::uint64_t to_index(std::uint64_t w, std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(w) * n) >> 64);
}

/// Per-row bit generator: successive Philox blocks for a fixed (key, row).
/// Satisfies UniformRandomBitGenerator, so it can drive distribution objects.
class RowEngine {
public:
    using result_type = std::uint64_t;

    RowEngine(Key key, std::uint64_t row) noexcept : key_(key), row_(row) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        if (used_ == 4) {
            const auto w = draw_pair(key_, row_, slot_);
            slot_ += 2;
            buffer_ = {w[0].a, w[0].b, w[1].a, w[1].b};
            used_ = 0;
        }
        return buffer_[used_++];
    }

private:
    Key key_;
    std::uint64_t row_;
    std::uint32_t slot_ = 0;
    std::array<std::uint64_t, 4> buffer_{};
    unsigned used_ = 4;
};

/// Standard normal draw (ziggurat).  boost's normal_distribution keeps no
/// state between calls, so the result depends only on the engine.
inline double standard_normal(RowEngine& engine) {
    return boost::random::normal_distribution<double>{}(engine);
}

inline double unit_uniform(RowEngine& engine) { return to_unit_open(engine()); }

}  // namespace biaslab::rng
