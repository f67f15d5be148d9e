#include "netabc/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numbers>

#include "netabc/error.hpp"

namespace netabc::stats {

double mean(std::span<const double> x)
{
    if (x.empty()) {
        throw InvalidArgument("mean of an empty sample");
    }
    double s = 0.0;
    for (const double v : x) {
        s += v;
    }
    return s / static_cast<double>(x.size());
}

double sd(std::span<const double> x)
{
    if (x.size() < 2) {
        return 0.0;
    }
    const double m = mean(x);
    double ss = 0.0;
    for (const double v : x) {
        ss += (v - m) * (v - m);
    }
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double standard_error(std::span<const double> x)
{
    return x.empty() ? 0.0 : sd(x) / std::sqrt(static_cast<double>(x.size()));
}

double quantile(std::span<const double> x, double q)
{
    const double qs[1] = {q};
    return quantiles(x, qs).front();
}

std::vector<double> quantiles(std::span<const double> x, std::span<const double> qs)
{
    if (x.empty()) {
        throw InvalidArgument("quantile of an empty sample");
    }
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(qs.size());
    for (const double q : qs) {
        if (!(q >= 0.0 && q <= 1.0)) {
            throw InvalidArgument("quantile level must lie in [0, 1]");
        }
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        out.push_back(frac == 0.0 ? sorted[lo] : sorted[lo] + frac * (sorted[hi] - sorted[lo]));
    }
    return out;
}

double kolmogorov_survival(double lambda)
{
    if (lambda <= 0.0) {
        return 1.0;
    }
    if (lambda < 0.3) {
        // The alternating series converges slowly here; use the dual form.
        const double t = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
        double cdf = 0.0;
        for (int k = 1; k <= 50; k += 2) {
            cdf += std::exp(-static_cast<double>(k * k) * t);
        }
        cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-17) {
            break;
        }
    }
    return std::clamp(s, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty()) {
        throw InvalidArgument("KS test needs two non-empty samples");
    }
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double n = static_cast<double>(x.size());
    const double m = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) {
            ++i;
        }
        while (j < y.size() && y[j] == v) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    const double en = std::sqrt(n * m / (n + m));
    return {d, kolmogorov_survival((en + 0.12 + 0.11 / en) * d)};
}

KsResult ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf)
{
    if (x.empty()) {
        throw InvalidArgument("KS test needs a non-empty sample");
    }
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    const double en = std::sqrt(n);
    return {d, kolmogorov_survival((en + 0.12 + 0.11 / en) * d)};
}

double chi_square_survival(double statistic, double dof)
{
    if (statistic <= 0.0) {
        return 1.0;
    }
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), statistic));
}

double silverman_bandwidth(std::span<const double> x)
{
    if (x.size() < 2) {
        return 1.0;
    }
    const double s = sd(x);
    const double qs[2] = {0.25, 0.75};
    const auto iqr = quantiles(x, qs);
    double spread = std::min(s, (iqr[1] - iqr[0]) / 1.34);
    if (!(spread > 0.0)) {
        spread = s > 0.0 ? s : 1.0;
    }
    return 0.9 * spread * std::pow(static_cast<double>(x.size()), -0.2);
}

std::vector<DensityPoint> gaussian_kde(std::span<const double> x, double lo, double hi, int points)
{
    if (x.empty() || points < 2 || !(hi > lo)) {
        throw InvalidArgument("KDE needs samples, at least two grid points and hi > lo");
    }
    const double h = silverman_bandwidth(x);
    const double norm = 1.0 / (static_cast<double>(x.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    std::vector<DensityPoint> out;
    out.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double g = lo + (hi - lo) * i / (points - 1);
        double s = 0.0;
        for (const double v : x) {
            const double z = (g - v) / h;
            s += std::exp(-0.5 * z * z);
        }
        out.push_back({g, s * norm});
    }
    return out;
}

} // namespace netabc::stats
