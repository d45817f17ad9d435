#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace shp {

/// Deterministic random generator with hand-specified sampling algorithms.
///
/// All distribution draws are implemented here instead of relying on
/// std:: distributions, whose algorithms are implementation-defined; this
/// keeps streams bit-for-bit reproducible across standard libraries.
/// Substreams are derived by mixing the base seed with integer tags, so a
/// (seed, model, sequence) triple always names the same stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent substream tagged by up to three indices.
    static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0) {
        std::uint64_t s = mix(seed ^ 0x9e3779b97f4a7c15ULL);
        s = mix(s ^ (a + 0x165667b19e3779f9ULL));
        s = mix(s ^ (b + 0x85ebca77c2b2ae63ULL));
        s = mix(s ^ (c + 0x27d4eb2f165667c5ULL));
        return Rng(s);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Exponential with the given rate (inverse-CDF draw).
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    /// Poisson count by summing unit-rate exponential gaps; exact and free of
    /// the underflow the product form hits for large means.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        std::uint64_t n = 0;
        double acc = exponential(1.0);
        while (acc <= mean) {
            ++n;
            acc += exponential(1.0);
        }
        return n;
    }

    /// Integer uniform on [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection against the largest multiple of n to avoid modulo bias.
        const std::uint64_t limit = n * (~std::uint64_t{0} / n);
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

private:
    static std::uint64_t mix(std::uint64_t x) {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace shp
