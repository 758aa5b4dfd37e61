#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace txadv {

// Deterministic splitmix64 generator. The standard <random> distributions
// are implementation-defined, so every random draw in the artifact goes
// through this type to keep outputs byte-identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 bits of precision.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive bounds
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller; recomputes both uniforms per call so a stream's output
    // depends only on the number of prior draws.
    double normal(double mean, double sigma) {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Independent per-row stream: hashing (seed, row) makes row-parallel
    // generation equal to serial generation.
    static Rng for_row(std::uint64_t seed, std::uint64_t row) {
        Rng mix(seed);
        const std::uint64_t a = mix.next_u64();
        Rng mix2(row ^ 0xd1b54a32d192ed03ULL);
        return Rng(a ^ mix2.next_u64());
    }

    // Seeded Fisher-Yates over indices [0, n).
    template <typename Vec>
    void shuffle(Vec& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace txadv
