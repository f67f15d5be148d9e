#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace netabc {

/// Mixes (master, stream, index) into a 64-bit seed. Streams derived from
/// different indices are independent for all practical purposes, which lets
/// every replicate own its generator without coordination.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

/// Stream tags used with derive_seed so table rows, test items and
/// predictive replicates never share a generator.
namespace streams {
inline constexpr std::uint64_t table = 0;
inline constexpr std::uint64_t test_set = 1;
inline constexpr std::uint64_t predictive = 2;
inline constexpr std::uint64_t prior_draws = 3;
} // namespace streams

/// Seeded random stream owned by one replicate: a counter-based generator
/// (SplitMix64 finalizer applied to seed + k * golden gamma) plus the exact
/// samplers the simulator needs. Satisfies UniformRandomBitGenerator.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()()
    {
        std::uint64_t z = (counter_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_index(std::uint64_t n);

    /// Number of failures before the next success of a Bernoulli(p) sequence.
    /// Returns UINT64_MAX when p <= 0.
    std::uint64_t geometric_skip(double p);
    /// Same as geometric_skip(p) given log_q = log(1 - p) < 0.
    std::uint64_t geometric_skip_log(double log_q);

    /// Exact Poisson sample by sequential inversion. Large means are split
    /// into independent chunks so exp(-mean) never underflows.
    std::uint64_t poisson(double mean);

    double beta(double a, double b);

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

/// Calls visit(i) for each index in [0, n) selected independently with
/// probability p, skipping geometrically between selections.
template <typename Visit>
void for_each_bernoulli(RandomStream& rng, std::uint64_t n, double p, Visit&& visit)
{
    if (n == 0 || !(p > 0.0)) {
        return;
    }
    if (p >= 1.0) {
        for (std::uint64_t i = 0; i < n; ++i) {
            visit(i);
        }
        return;
    }
    const double log_q = std::log1p(-p);
    std::uint64_t i = rng.geometric_skip_log(log_q);
    while (i < n) {
        visit(i);
        const std::uint64_t skip = rng.geometric_skip_log(log_q);
        if (skip >= n - i) {
            break;
        }
        i += skip + 1;
    }
}

} // namespace netabc
