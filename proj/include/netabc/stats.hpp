#pragma once

#include <functional>
#include <span>
#include <vector>

namespace netabc::stats {

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sd(std::span<const double> x);
double standard_error(std::span<const double> x);

/// Linear interpolation between order statistics: position (n - 1) * q.
double quantile(std::span<const double> x, double q);
std::vector<double> quantiles(std::span<const double> x, std::span<const double> qs);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
/// One-sample test against a continuous CDF.
KsResult ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf);
/// Kolmogorov distribution survival function P(K > lambda).
double kolmogorov_survival(double lambda);

/// Upper tail of the chi-square distribution.
double chi_square_survival(double statistic, double dof);

/// Silverman's rule-of-thumb bandwidth 0.9 min(sd, IQR/1.34) n^(-1/5).
double silverman_bandwidth(std::span<const double> x);

struct DensityPoint {
    double x;
    double density;
};
/// Gaussian KDE evaluated on `points` equally spaced values over [lo, hi].
std::vector<DensityPoint> gaussian_kde(std::span<const double> x, double lo, double hi, int points);

} // namespace netabc::stats
