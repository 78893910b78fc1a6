// Counter-based random streams. A stream is keyed by (seed, purpose, a, b),
// so draws never depend on the order in which nodes or rounds are evaluated.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace confinit {

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

enum class StreamPurpose : std::uint64_t {
    placement = 1,
    attacker_selection = 2,
    sensing_noise = 3,
    forging = 4,
    crash_selection = 5,
};

class CounterRng {
public:
    CounterRng(std::uint64_t seed, StreamPurpose purpose, std::uint64_t a = 0, std::uint64_t b = 0)
        : key_(splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(purpose)) ^ a) ^
               splitmix64(b + 0x632be59bd9b4e019ULL))
    {
    }

    std::uint64_t next_u64() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform on [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer on [0, n), n > 0, by rejection sampling.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    bool coin() { return (next_u64() >> 63) != 0; }

    /// Standard normal via Box-Muller.
    double normal()
    {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace confinit
