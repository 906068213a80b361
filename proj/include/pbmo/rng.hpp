#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace pbmo {

/// Seeded generator with portable draws.
///
/// std::mt19937_64 output is fixed by the standard, but the <random>
/// distributions are not, so all derived draws are computed here to keep
/// results byte-stable across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t index(std::size_t n) {
        // rejection sampling keeps the draw unbiased
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return static_cast<std::size_t>(r % n);
    }

    /// Uniform integer in [lo, hi].
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + index(hi - lo + 1); }

    /// Draw an index according to nonnegative weights summing to (about) one.
    std::size_t categorical(std::span<const double> probabilities) {
        const double u = uniform();
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < probabilities.size(); ++i) {
            if (probabilities[i] <= 0.0) continue;
            last_positive = i;
            acc += probabilities[i];
            if (u < acc) return i;
        }
        return last_positive;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace pbmo
