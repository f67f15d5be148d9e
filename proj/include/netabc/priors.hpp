#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netabc/kvfile.hpp"
#include "netabc/network.hpp"
#include "netabc/random.hpp"

namespace netabc {

/// The six inferred probabilities, in reporting order.
enum class Param : int { mu, rho, sigma, omega0, omega1, xi };
inline constexpr int kParamCount = 6;
inline constexpr std::array<Param, kParamCount> kAllParams{Param::mu,     Param::rho,    Param::sigma,
                                                           Param::omega0, Param::omega1, Param::xi};

std::string_view param_name(Param p);
std::optional<Param> param_from_name(std::string_view name);

double get_param(const ModelParams& params, Param p);
void set_param(ModelParams& params, Param p, double value);

/// Unit of the inverse-odds scale used for reporting: mu in years, xi
/// is reported as a probability, the rest in weeks.
std::string_view inverse_odds_unit(Param p);
/// (1 - p) / p converted to the reporting unit; xi is returned unchanged.
double to_reporting_scale(Param p, double probability);

struct BetaShape {
    double a = 1.0;
    double b = 1.0;

    double mean() const { return a / (a + b); }
    friend bool operator==(const BetaShape&, const BetaShape&) = default;
};

double beta_density(double x, BetaShape shape);
double beta_cdf(double x, BetaShape shape);
double beta_quantile(double q, BetaShape shape);

struct PriorConfig {
    std::array<BetaShape, kParamCount> shapes{};
    double n_fixed = 5000.0;

    static PriorConfig defaults();

    BetaShape& operator[](Param p) { return shapes[static_cast<std::size_t>(p)]; }
    const BetaShape& operator[](Param p) const { return shapes[static_cast<std::size_t>(p)]; }

    void validate() const;

    /// `mu = 2 1500` lines plus `n_fixed = 5000`. Missing keys keep defaults.
    KeyValues to_key_values() const;
    static PriorConfig from_key_values(const KeyValues& kv);
    std::uint64_t hash() const;

    friend bool operator==(const PriorConfig&, const PriorConfig&) = default;
};

ModelParams sample_prior(const PriorConfig& config, RandomStream& rng);
/// Product of the six beta densities; zero outside [0, 1]^6.
double prior_density(const PriorConfig& config, const ModelParams& params);

/// Point estimate from earlier studies, on the weekly probability scale.
struct LiteratureValue {
    Param param;
    double probability;
    std::string source;
};
std::vector<LiteratureValue> literature_values();

struct CoverageFailure {
    LiteratureValue value;
    double lower;
    double upper;
};
/// Literature values falling outside the central `level` interval of
/// their prior.
std::vector<CoverageFailure> check_coverage(const PriorConfig& config, double level = 0.98);

} // namespace netabc
