#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netabc/priors.hpp"
#include "netabc/reference_table.hpp"
#include "netabc/summary.hpp"

namespace netabc {

using Theta = std::array<double, kParamCount>;

Theta theta_of(const ModelParams& params);
ModelParams params_of(const Theta& theta, double n);

struct PosteriorSample {
    std::int64_t row = 0;
    std::uint64_t seed = 0;
    Theta theta_raw{};
    std::optional<Theta> theta_adjusted;
    double distance = 0.0;
    std::array<double, kSummaryCount> summaries{}; ///< normalized; only `used` entries meaningful

    const Theta& theta() const { return theta_adjusted ? *theta_adjusted : theta_raw; }
};

struct Posterior {
    std::vector<PosteriorSample> samples;
    SummaryMask used;              ///< summaries entering the distance
    std::int64_t eligible = 0;     ///< rows carrying every used summary
    std::int64_t excluded = 0;     ///< rows lacking at least one
    double epsilon = 0.0;          ///< largest accepted distance
    bool adjusted = false;
    bool adjustment_fallback = false;
    std::int64_t clamped = 0;      ///< adjusted values clamped into [0, 1]
};

/// Summaries used when matching `observed` with the given selection:
/// throws LayoutMismatch if `selected` asks for a summary the observed
/// vector lacks.
SummaryMask matching_summaries(const NormalizedSummaries& observed, SummaryMask selected);

/// Accepts the ceil(accept_fraction * eligible) rows of `view` closest to
/// `observed`; ties go to the smaller row seed.
Posterior abc_reject(const ReferenceTable& table, int view, const NormalizedSummaries& observed,
                     SummaryMask selected, double accept_fraction, bool parallel = true);

struct AdjustOptions {
    bool logit = false;
};

/// theta_i + f(t_obs) - f(t_i) with f fitted by OLS on the accepted rows.
/// Falls back to raw samples (adjustment_fallback = true) when there are
/// too few samples or the design matrix is rank deficient.
void regression_adjust(Posterior& posterior, const NormalizedSummaries& observed, const AdjustOptions& options = {});

struct QuantileRow {
    Param param;
    double level;
    double probability;
    double reporting; ///< inverse-odds scale (weeks; years for mu; xi as is)
};

std::vector<QuantileRow> posterior_quantiles(std::span<const Theta> samples, std::span<const double> levels);
std::vector<Theta> posterior_thetas(const Posterior& posterior);
Theta posterior_mean(const Posterior& posterior);

/// Tidy text for posterior samples: one line per sample with row, seed,
/// distance, raw and adjusted parameters.
std::string samples_to_csv(const Posterior& posterior);
/// Reads the parameter columns back (adjusted when present).
std::vector<Theta> samples_from_csv(const std::string& text, const std::string& source);

} // namespace netabc
