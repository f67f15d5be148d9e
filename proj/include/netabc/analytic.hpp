#pragma once

// Closed-form quantities of the network model in the infinite-population
// limit (serial monogamy, xi = 0), plus conversions between time scales.

namespace netabc::analytic {

struct SteadyStateReport {
    double f = 0.0;     ///< steady-state fraction paired
    double alpha = 0.0; ///< (1-mu)^2 (1-rho) (1-sigma)
    double beta = 0.0;  ///< (1-mu) (1-sigma) (1-rho)
    double expected_relationship_length = 0.0; ///< weeks
};

/// Per-step survival of a steady edge, (1-mu)^2 (1-sigma).
double edge_survival(double mu, double sigma);

/// Mean number of further steps a relationship survives, s / (1 - s) with
/// s the per-step edge survival. Throws DomainError when s == 1.
double expected_relationship_length(double mu, double sigma);

double alpha(double mu, double rho, double sigma);
double beta(double mu, double rho, double sigma);

/// rho / (1 - alpha). Throws DomainError when alpha == 1.
double steady_state_fraction_paired(double mu, double rho, double sigma);

/// Expected fraction paired among cohort members still present `tau` steps
/// after a cross-sectional sample. Equals the steady state at tau = 0 and
/// tends to rho / (1 - beta).
double cohort_fraction_paired(double mu, double rho, double sigma, double tau);

/// All of the above in one report. `expected_relationship_length` is
/// infinite when relationships never end.
SteadyStateReport steady_state(double mu, double rho, double sigma);

/// (1-mu)^tau
double expected_retained_nodes(double mu, double tau);
/// [(1-mu)^2 (1-sigma)]^tau
double expected_retained_edges(double mu, double sigma, double tau);

/// Probability of at least one event in `k` fine steps given per-step
/// probability q: 1 - (1-q)^k.
double prob_rescale(double q, double k);
/// Inverse of prob_rescale: 1 - (1-p)^(1/k).
double prob_unscale(double p, double k);

/// min(1, x * kappa / tau) for x expected events per period tau, simulated
/// at time scale kappa.
double rate_to_prob(double x, double tau, double kappa);

/// (1-p)/p, the expected number of steps before the next event. Throws
/// DomainError at p == 0.
double prob_to_inverse_odds(double p);
/// 1 / (1 + odds)
double inverse_odds_to_prob(double odds);

} // namespace netabc::analytic
