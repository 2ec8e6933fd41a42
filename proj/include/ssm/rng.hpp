#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace ssm {

// Deterministic random stream derived from (seed, label). Every consumer
// owns a label, so adding one consumer never shifts another's draws, and a
// fixed seed reproduces every experiment byte for byte. Raw draws come from
// std::mt19937_64; the value helpers below avoid std::*_distribution, whose
// output may differ across standard library implementations.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::string_view label)
        : eng_(mix(seed ^ fnv1a(label))) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0,1), 53-bit resolution.
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0,n); n must be positive. Rejection keeps it unbiased.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t(0) - ~std::uint64_t(0) % n;
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r >= limit);
        return r % n;
    }

    // Uniform integer in [lo, hi] inclusive.
    long long uniform_int(long long lo, long long hi) {
        return lo + (long long)uniform_below(std::uint64_t(hi - lo + 1));
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Exponential with mean 1.
    double exponential() { return -std::log1p(-uniform01()); }

private:
    static constexpr std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 1469598103934665603ull;
        for (char c : s) {
            h ^= (unsigned char)c;
            h *= 1099511628211ull;
        }
        return h;
    }

    // splitmix64 finalizer; spreads structured seeds over the engine's space.
    static constexpr std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 eng_;
};

} // namespace ssm
