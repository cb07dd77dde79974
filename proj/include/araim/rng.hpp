#pragma once

// Splittable random streams.
//
// Every Monte-Carlo routine draws from one stream per batch. A stream is a
// xoshiro256++ engine whose 256-bit state is filled by four successive
// splitmix64 outputs, starting from
//
//     mix(mix(mix(seed) ^ purpose) ^ batch_index)
//
// where mix is the splitmix64 finalizer and `purpose` is a fixed tag per
// routine (see StreamPurpose). Within a batch, draws are consumed strictly in
// program order, so a batch's output depends only on (seed, purpose, batch).

#include <cstdint>
#include <limits>

namespace araim::rng {

enum class StreamPurpose : std::uint64_t {
    ConditionalPout = 0x636f6e64706f7574ULL,  // "condpout"
    FalseAlertSim = 0x66616c7365616c74ULL,    // "falsealt"
    Constellation = 0x636f6e7374656c6cULL,    // "constell"
};

/// splitmix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}
    constexpr std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256++ (Blackman & Vigna); satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256pp(std::uint64_t seed) noexcept {
        SplitMix64 sm(seed);
        for (auto& word : s_) {
            word = sm.next();
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

constexpr std::uint64_t stream_key(std::uint64_t seed, StreamPurpose purpose,
                                   std::uint64_t batch_index) noexcept {
    return mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(purpose)) ^ batch_index);
}

inline Xoshiro256pp make_stream(std::uint64_t seed, StreamPurpose purpose,
                                std::uint64_t batch_index) noexcept {
    return Xoshiro256pp(stream_key(seed, purpose, batch_index));
}

/// Uniform double in [0, 1) from the top 53 bits.
template <class Engine>
double uniform01(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace araim::rng
