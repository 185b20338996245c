#pragma once

#include <cstdint>

#include "maskcheck/zq.hpp"

namespace maskcheck {

/// Counter-based generator: the n-th output of stream s under seed k is a
/// pure function of (k, s, n), so work split across threads draws the same
/// values no matter how it is scheduled.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ull))) {}

    std::uint64_t next() noexcept { return mix(key_ + 0x9E3779B97F4A7C15ull * ++counter_); }

    /// Uniform in [0, bound) by rejection; bound must be positive.
    std::uint64_t uniform(std::uint64_t bound) noexcept {
        const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t x = next();
            if (x >= limit) return x % bound;
        }
    }

    Zq element(Modulus q) noexcept { return Zq(uniform(q.value()), q); }

    /// A child stream, independent of this one's position.
    CounterRng split(std::uint64_t child) const noexcept {
        CounterRng r(0, 0);
        r.key_ = mix(key_ ^ mix(child + 0xD1B54A32D192ED03ull));
        return r;
    }

private:
    // SplitMix64 finaliser.
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace maskcheck
