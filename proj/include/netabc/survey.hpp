#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "netabc/network.hpp"
#include "netabc/summary.hpp"

namespace netabc {

/// Virtual survey instrument.
struct SurveyDesign {
    int m = 403;             ///< respondents per wave
    int waves = 1;
    int lag = 0;             ///< weeks between consecutive waves
    int tlfb_window = 52;    ///< timeline follow-back recall window, weeks
    int casual_recall = 1;   ///< weeks covered by the binary casual question
    double dropout = 0.0;    ///< per-wave probability a retained respondent drops out

    /// Throws InvalidArgument on inconsistent values; `retention` is the
    /// simulator's casual-history window.
    void validate(int retention) const;

    friend bool operator==(const SurveyDesign&, const SurveyDesign&) = default;
};

/// Simulator settings shared by every survey run.
struct SimulatorSettings {
    Step burn_in = 1560;
    int retention = 52;

    friend bool operator==(const SimulatorSettings&, const SimulatorSettings&) = default;
};

using Cohort = std::vector<NodeId>; // sorted

/// Uniform sample of m node ids without replacement.
Cohort sample_cohort(const NetworkState& state, int m, RandomStream& rng);

/// Cross-sectional summaries of `cohort` at the state's current step. The
/// retention summaries are left absent.
SummaryVector cross_sectional_summaries(const NetworkState& state, const EventLog& log, const Cohort& cohort,
                                        const SurveyDesign& design);

/// Steady edges incident to at least one cohort member, each listed once.
std::vector<SteadyEdge> cohort_edges(const NetworkState& state, const Cohort& cohort);

struct LongitudinalResult {
    SummaryVector summaries;  ///< only the two retention entries set
    Cohort next_cohort;       ///< members still present (and not dropped out)
};

/// Retention of cohort members and of their steady edges between two waves.
/// `previous_edges` must be cohort_edges() at the earlier wave. Dropout
/// draws consume `rng` only when design.dropout > 0.
LongitudinalResult longitudinal_summaries(const Cohort& cohort, const NetworkState& next_state,
                                          std::span<const SteadyEdge> previous_edges, const SurveyDesign& design,
                                          RandomStream& rng);

/// Simulates burn-in then `waves` survey waves `lag` weeks apart, all drawn
/// from `rng`. Cross-sectional entries are count-weighted averages over
/// waves, retention entries count-weighted averages over wave pairs.
SummaryVector run_survey(const ModelParams& params, const SurveyDesign& design, const SimulatorSettings& settings,
                         RandomStream& rng);
SummaryVector run_survey(const ModelParams& params, const SurveyDesign& design, const SimulatorSettings& settings,
                         std::uint64_t seed);

/// One trajectory observed at several lags: element i is what run_survey
/// would return for a design with waves = 2 and lag = lags[i] (a single
/// wave for lag 0). `lags` must be sorted ascending. Requires dropout == 0
/// so that all lags share one trajectory exactly.
std::vector<SummaryVector> run_survey_lags(const ModelParams& params, const SurveyDesign& base,
                                           std::span<const int> lags, const SimulatorSettings& settings,
                                           RandomStream& rng);

} // namespace netabc
