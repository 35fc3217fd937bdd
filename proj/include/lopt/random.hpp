#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace lopt {

/// Counter-based generator: draw k of stream (seed) is splitmix64(seed, k).
///
/// Output is a pure function of (seed, counter), independent of platform and
/// standard-library distribution implementations. `split(tag)` derives an
/// independent child stream, so parallel work can take one stream per task.
class CounterRng
{
public:
    explicit CounterRng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ull)) {}

    static constexpr std::uint64_t mix(std::uint64_t z)
    {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t at(std::uint64_t counter) const { return mix(key_ + mix(counter)); }

    std::uint64_t next_u64() { return at(counter_++); }

    CounterRng split(std::uint64_t tag) const
    {
        CounterRng child;
        child.key_ = mix(key_ ^ mix(tag + 0x3c6ef372fe94f82bull));
        return child;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n)
    {
        // Lemire-style rejection keeps the result unbiased.
        const std::uint64_t threshold = (0 - n) % n;
        while (true) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) {
                return r % n;
            }
        }
    }

    /// Standard normal via Box-Muller (one draw per call; two uniforms consumed).
    double normal()
    {
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace lopt
