#include "netabc/analytic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "netabc/error.hpp"

namespace netabc::analytic {

namespace {

void require_probability(double p, const char* name)
{
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
    }
}

void require_lag(double tau)
{
    if (!(tau >= 0.0)) {
        throw InvalidArgument("lag must be non-negative");
    }
}

// base^exponent for base in [0, 1], falling back to log space when the
// direct power would underflow.
double power_of_unit(double base, double exponent)
{
    const double direct = std::pow(base, exponent);
    if (direct >= 1e-300 || base == 0.0) {
        return direct;
    }
    return std::exp(exponent * std::log(base));
}

} // namespace

double edge_survival(double mu, double sigma)
{
    require_probability(mu, "mu");
    require_probability(sigma, "sigma");
    return (1.0 - mu) * (1.0 - mu) * (1.0 - sigma);
}

double expected_relationship_length(double mu, double sigma)
{
    const double s = edge_survival(mu, sigma);
    if (s >= 1.0) {
        throw DomainError("relationships never end: expected length is infinite");
    }
    return s / (1.0 - s);
}

double alpha(double mu, double rho, double sigma)
{
    require_probability(rho, "rho");
    return edge_survival(mu, sigma) * (1.0 - rho);
}

double beta(double mu, double rho, double sigma)
{
    require_probability(mu, "mu");
    require_probability(rho, "rho");
    require_probability(sigma, "sigma");
    return (1.0 - mu) * (1.0 - sigma) * (1.0 - rho);
}

double steady_state_fraction_paired(double mu, double rho, double sigma)
{
    const double a = alpha(mu, rho, sigma);
    if (a >= 1.0) {
        throw DomainError("no dynamics (rho = sigma = mu = 0): steady state undefined");
    }
    return rho / (1.0 - a);
}

double cohort_fraction_paired(double mu, double rho, double sigma, double tau)
{
    require_lag(tau);
    const double a = alpha(mu, rho, sigma);
    const double b = beta(mu, rho, sigma);
    if (a >= 1.0 || b >= 1.0) {
        throw DomainError("no dynamics (rho = sigma = mu = 0): steady state undefined");
    }
    return rho / (1.0 - b) * (1.0 - power_of_unit(b, tau + 1.0) * (mu / (1.0 - a)));
}

SteadyStateReport steady_state(double mu, double rho, double sigma)
{
    SteadyStateReport report;
    report.alpha = alpha(mu, rho, sigma);
    report.beta = beta(mu, rho, sigma);
    report.f = steady_state_fraction_paired(mu, rho, sigma);
    const double s = edge_survival(mu, sigma);
    report.expected_relationship_length = s >= 1.0 ? std::numeric_limits<double>::infinity() : s / (1.0 - s);
    return report;
}

double expected_retained_nodes(double mu, double tau)
{
    require_probability(mu, "mu");
    require_lag(tau);
    return power_of_unit(1.0 - mu, tau);
}

double expected_retained_edges(double mu, double sigma, double tau)
{
    require_lag(tau);
    return power_of_unit(edge_survival(mu, sigma), tau);
}

double prob_rescale(double q, double k)
{
    require_probability(q, "q");
    if (!(k >= 1.0)) {
        throw InvalidArgument("steps per coarse step must be at least 1");
    }
    return 1.0 - std::pow(1.0 - q, k);
}

double prob_unscale(double p, double k)
{
    require_probability(p, "p");
    if (!(k >= 1.0)) {
        throw InvalidArgument("steps per coarse step must be at least 1");
    }
    return 1.0 - std::pow(1.0 - p, 1.0 / k);
}

double rate_to_prob(double x, double tau, double kappa)
{
    if (!(x >= 0.0) || !(tau > 0.0) || !(kappa > 0.0) || !std::isfinite(x)) {
        throw InvalidArgument("rate conversion requires x >= 0, period > 0 and scale > 0");
    }
    const double p = x * kappa / tau;
    return p < 1.0 ? p : 1.0;
}

double prob_to_inverse_odds(double p)
{
    require_probability(p, "p");
    if (p == 0.0) {
        throw DomainError("inverse odds undefined at probability 0");
    }
    return (1.0 - p) / p;
}

double inverse_odds_to_prob(double odds)
{
    if (!(odds >= 0.0)) {
        throw InvalidArgument("inverse odds must be non-negative");
    }
    return 1.0 / (1.0 + odds);
}

} // namespace netabc::analytic
