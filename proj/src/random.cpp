#include "netabc/random.hpp"

#include <limits>

namespace netabc {

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr double kPoissonChunk = 500.0;

__extension__ typedef unsigned __int128 u128;

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index)
{
    std::uint64_t state = master;
    std::uint64_t h = splitmix64(state);
    state = h ^ (stream * 0xd1b54a32d192ed03ULL);
    h = splitmix64(state);
    state = h ^ index;
    return splitmix64(state);
}

RandomStream::RandomStream(std::uint64_t seed)
    : seed_(seed)
    , counter_(seed)
{
    // Scramble the starting counter so nearby seeds do not share outputs
    // shifted by a few positions.
    std::uint64_t state = seed;
    counter_ = splitmix64(state) ^ 0x5851f42d4c957f2dULL;
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n)
{
    // Multiply-shift with rejection of the biased low band.
    u128 product = static_cast<u128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(product);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            product = static_cast<u128>((*this)()) * n;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::uint64_t>(product >> 64);
}

std::uint64_t RandomStream::geometric_skip(double p)
{
    if (!(p > 0.0)) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    if (p >= 1.0) {
        return 0;
    }
    return geometric_skip_log(std::log1p(-p));
}

std::uint64_t RandomStream::geometric_skip_log(double log_q)
{
    const double u = 1.0 - uniform(); // (0, 1]
    const double g = std::floor(std::log(u) / log_q);
    if (!(g < 1.8e19)) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(g);
}

std::uint64_t RandomStream::poisson(double mean)
{
    std::uint64_t total = 0;
    while (mean > 0.0) {
        const double chunk = mean > kPoissonChunk ? kPoissonChunk : mean;
        mean -= chunk;
        double p = std::exp(-chunk);
        double cdf = p;
        const double u = uniform();
        std::uint64_t k = 0;
        while (u >= cdf) {
            ++k;
            p *= chunk / static_cast<double>(k);
            const double next = cdf + p;
            if (next == cdf) {
                break; // tail exhausted in double precision
            }
            cdf = next;
        }
        total += k;
    }
    return total;
}

double RandomStream::beta(double a, double b)
{
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(*this);
    const double y = gb(*this);
    if (x + y == 0.0) {
        return a >= b ? 1.0 : 0.0;
    }
    return x / (x + y);
}

} // namespace netabc
