#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace dsinfer {

/// Root seed of a reproducible computation.
struct RandomSeed {
    std::uint64_t value = 0;
};

/// xoshiro256++ generator with a documented sub-stream derivation.
///
/// `Stream::derive(seed, index)` seeds a SplitMix64 sequence at
/// `seed XOR (0xD1B54A32D192ED03 * (index + 1))` and takes its next four
/// outputs as the xoshiro state. Monte-Carlo loops assign fixed-size chunks of
/// draw indices to sub-stream `index = chunk`, so results never depend on the
/// number of worker threads.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit Stream(std::uint64_t seed = 0) : Stream(derive(RandomSeed{seed}, 0)) {}

    static Stream derive(RandomSeed seed, std::uint64_t index) {
        std::uint64_t sm = seed.value ^ (0xD1B54A32D192ED03ULL * (index + 1));
        Stream s{Raw{}};
        for (auto& word : s.state_) word = splitmix64(sm);
        return s;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a logarithm argument.
    double uniform_pos() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform integer on [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        // Lemire's multiply-shift with rejection of the biased tail.
        std::uint64_t x = (*this)();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = (*this)();
                m = static_cast<__uint128_t>(x) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    struct Raw {};
    explicit Stream(Raw) {}

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace dsinfer
