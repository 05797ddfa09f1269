#pragma once

// Counter-based random numbers (Philox4x32-10).
//
// Every random quantity in the toolkit is a pure function of a 64-bit seed
// and an integer counter, so results never depend on traversal order or on
// how work is split across threads.

#include <array>
#include <cstdint>
#include <string_view>

namespace gk {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter apply(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

    static constexpr Key key_from_seed(std::uint64_t seed) noexcept {
        return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// 53-bit uniform double in [0,1) from two 32-bit words.
constexpr double to_unit_interval(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Stateless draw: the value at (a, b) under `seed` and `stream`.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint32_t stream) noexcept
        : key_(Philox4x32::key_from_seed(seed)), stream_(stream) {}

    constexpr Philox4x32::Counter block(std::uint32_t a, std::uint32_t b) const noexcept {
        return Philox4x32::apply({a, b, stream_, 0u}, key_);
    }

    constexpr double uniform(std::uint32_t a, std::uint32_t b = 0) const noexcept {
        const auto out = block(a, b);
        return to_unit_interval(out[0], out[1]);
    }

private:
    Philox4x32::Key key_;
    std::uint32_t stream_;
};

/// Sequential engine usable with <random> adaptors; the n-th output depends
/// only on (seed, stream, n).
class PhiloxEngine {
public:
    using result_type = std::uint32_t;

    PhiloxEngine(std::uint64_t seed, std::uint32_t stream) noexcept : rng_(seed, stream) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return 0xFFFFFFFFu; }

    result_type operator()() noexcept {
        if (lane_ == 4) {
            buffer_ = rng_.block(static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32));
            ++index_;
            lane_ = 0;
        }
        return buffer_[lane_++];
    }

    double uniform() noexcept {
        const auto hi = (*this)();
        const auto lo = (*this)();
        return to_unit_interval(hi, lo);
    }

private:
    CounterRng rng_;
    Philox4x32::Counter buffer_{};
    std::uint64_t index_ = 0;
    int lane_ = 4;
};

// Stream tags keep independent uses of one seed from overlapping.
namespace streams {
inline constexpr std::uint32_t kSamplePoints = 1;
inline constexpr std::uint32_t kEdges = 2;
inline constexpr std::uint32_t kCutNorm = 3;
inline constexpr std::uint32_t kInitialPhases = 4;
inline constexpr std::uint32_t kTaskSeeds = 5;
}  // namespace streams

/// FNV-1a, used to fold names into seeds and hash configs.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char ch : text) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Keyed 64-bit hash of (n, index, name) under the master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n, std::uint64_t index,
                                    std::string_view name) noexcept {
    const std::uint64_t tag = fnv1a64(name);
    const auto out = Philox4x32::apply(
        {static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(index),
         static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32) ^ streams::kTaskSeeds},
        Philox4x32::key_from_seed(master));
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace gk
