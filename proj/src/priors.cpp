#include "netabc/priors.hpp"

#include <boost/math/distributions/beta.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "netabc/analytic.hpp"
#include "netabc/error.hpp"

namespace netabc {

namespace {

constexpr std::array<std::string_view, kParamCount> kNames{"mu", "rho", "sigma", "omega0", "omega1", "xi"};
constexpr double kWeeksPerYear = 52.0;

double weekly_from_years(double years) { return analytic::rate_to_prob(1.0, years * kWeeksPerYear, 1.0); }

} // namespace

std::string_view param_name(Param p) { return kNames[static_cast<std::size_t>(p)]; }

std::optional<Param> param_from_name(std::string_view name)
{
    for (const Param p : kAllParams) {
        if (param_name(p) == name) {
            return p;
        }
    }
    return std::nullopt;
}

double get_param(const ModelParams& params, Param p)
{
    switch (p) {
    case Param::mu:
        return params.mu;
    case Param::rho:
        return params.rho;
    case Param::sigma:
        return params.sigma;
    case Param::omega0:
        return params.omega0;
    case Param::omega1:
        return params.omega1;
    case Param::xi:
        return params.xi;
    }
    return 0.0;
}

void set_param(ModelParams& params, Param p, double value)
{
    switch (p) {
    case Param::mu:
        params.mu = value;
        break;
    case Param::rho:
        params.rho = value;
        break;
    case Param::sigma:
        params.sigma = value;
        break;
    case Param::omega0:
        params.omega0 = value;
        break;
    case Param::omega1:
        params.omega1 = value;
        break;
    case Param::xi:
        params.xi = value;
        break;
    }
}

std::string_view inverse_odds_unit(Param p)
{
    switch (p) {
    case Param::mu:
        return "years";
    case Param::xi:
        return "probability";
    default:
        return "weeks";
    }
}

double to_reporting_scale(Param p, double probability)
{
    if (p == Param::xi) {
        return probability;
    }
    if (!(probability > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    const double weeks = analytic::prob_to_inverse_odds(probability);
    return p == Param::mu ? weeks / kWeeksPerYear : weeks;
}

double beta_density(double x, BetaShape shape)
{
    if (!(x >= 0.0 && x <= 1.0)) {
        return 0.0;
    }
    if ((x == 0.0 && shape.a > 1.0) || (x == 1.0 && shape.b > 1.0)) {
        return 0.0;
    }
    return boost::math::pdf(boost::math::beta_distribution<double>(shape.a, shape.b), x);
}

double beta_cdf(double x, BetaShape shape)
{
    if (x <= 0.0) {
        return 0.0;
    }
    if (x >= 1.0) {
        return 1.0;
    }
    return boost::math::cdf(boost::math::beta_distribution<double>(shape.a, shape.b), x);
}

double beta_quantile(double q, BetaShape shape)
{
    return boost::math::quantile(boost::math::beta_distribution<double>(shape.a, shape.b), q);
}

PriorConfig PriorConfig::defaults()
{
    PriorConfig c;
    c[Param::mu] = {2.0, 1500.0};
    c[Param::rho] = {2.0, 40.0};
    c[Param::sigma] = {2.0, 60.0};
    c[Param::omega0] = {2.0, 4.0};
    c[Param::omega1] = {2.0, 6.0};
    c[Param::xi] = {2.0, 2.0};
    c.n_fixed = 5000.0;
    return c;
}

void PriorConfig::validate() const
{
    for (const Param p : kAllParams) {
        const BetaShape& s = (*this)[p];
        if (!(s.a > 0.0 && s.b > 0.0 && std::isfinite(s.a) && std::isfinite(s.b))) {
            throw InvalidArgument("beta shapes for " + std::string(param_name(p)) + " must be positive and finite");
        }
    }
    if (!(n_fixed > 0.0 && std::isfinite(n_fixed))) {
        throw InvalidArgument("n_fixed must be positive");
    }
}

KeyValues PriorConfig::to_key_values() const
{
    KeyValues kv;
    for (const Param p : kAllParams) {
        const BetaShape& s = (*this)[p];
        kv.set(std::string(param_name(p)), format_double(s.a) + " " + format_double(s.b));
    }
    kv.set("n_fixed", n_fixed);
    return kv;
}

PriorConfig PriorConfig::from_key_values(const KeyValues& kv)
{
    PriorConfig c = defaults();
    for (const auto& [key, value] : kv.entries()) {
        if (key == "n_fixed") {
            c.n_fixed = kv.require_double(key);
            continue;
        }
        const auto p = param_from_name(key);
        if (!p) {
            throw IoError(kv.source() + ": unknown prior key '" + key + "'");
        }
        std::istringstream in(value);
        std::string a;
        std::string b;
        std::string extra;
        if (!(in >> a >> b) || (in >> extra)) {
            throw IoError(kv.source() + ": prior '" + key + "' needs two shape values");
        }
        try {
            c[*p] = {parse_double(a), parse_double(b)};
        } catch (const InvalidArgument& e) {
            throw IoError(kv.source() + ": prior '" + key + "': " + e.what());
        }
    }
    c.validate();
    return c;
}

std::uint64_t PriorConfig::hash() const { return fnv1a(to_key_values().to_text()); }

ModelParams sample_prior(const PriorConfig& config, RandomStream& rng)
{
    ModelParams params;
    params.n = config.n_fixed;
    for (const Param p : kAllParams) {
        const BetaShape& s = config[p];
        set_param(params, p, rng.beta(s.a, s.b));
    }
    return params;
}

double prior_density(const PriorConfig& config, const ModelParams& params)
{
    double density = 1.0;
    for (const Param p : kAllParams) {
        density *= beta_density(get_param(params, p), config[p]);
        if (density == 0.0) {
            break;
        }
    }
    return density;
}

std::vector<LiteratureValue> literature_values()
{
    return {
        {Param::mu, weekly_from_years(10.0), "10-year migration timescale"},
        {Param::mu, weekly_from_years(30.0), "30-year migration timescale"},
        {Param::mu, weekly_from_years(60.0), "60-year migration timescale"},
        {Param::rho, analytic::prob_rescale(0.01, 7), "daily seek probability 0.01"},
        {Param::rho, analytic::rate_to_prob(0.73, kWeeksPerYear, 1.0), "0.73 partnerships per year"},
        {Param::rho, analytic::inverse_odds_to_prob(24.9), "Stockholm fit, 24.9 weeks"},
        {Param::sigma, analytic::inverse_odds_to_prob(42.2), "Stockholm fit, 42.2 weeks"},
        {Param::omega0, analytic::inverse_odds_to_prob(1.8), "Stockholm fit, 1.8 weeks"},
        {Param::omega1, analytic::inverse_odds_to_prob(4.5), "Stockholm fit, 4.5 weeks"},
        {Param::xi, 0.23, "Stockholm fit"},
    };
}

std::vector<CoverageFailure> check_coverage(const PriorConfig& config, double level)
{
    if (!(level > 0.0 && level < 1.0)) {
        throw InvalidArgument("coverage level must lie in (0, 1)");
    }
    const double tail = (1.0 - level) / 2.0;
    std::vector<CoverageFailure> out;
    for (const LiteratureValue& v : literature_values()) {
        const BetaShape& s = config[v.param];
        const double lo = beta_quantile(tail, s);
        const double hi = beta_quantile(1.0 - tail, s);
        if (v.probability < lo || v.probability > hi) {
            out.push_back({v, lo, hi});
        }
    }
    return out;
}

} // namespace netabc
