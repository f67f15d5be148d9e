#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "netabc/abc.hpp"

namespace netabc {

/// Replicate r draws a parameter vector uniformly from `samples` and runs
/// one survey, all from derive_seed(seed, predictive, r).
std::vector<SummaryVector> posterior_predictive_serial(std::span<const Theta> samples, double n,
                                                       const SurveyDesign& design, const SimulatorSettings& settings,
                                                       int replicates, std::uint64_t seed);
std::vector<SummaryVector> posterior_predictive(std::span<const Theta> samples, double n, const SurveyDesign& design,
                                                const SimulatorSettings& settings, int replicates, std::uint64_t seed,
                                                int workers = 0);

/// Summaries a survey observed at `lag` can produce (no retention at lag 0).
SummaryMask producible_summaries(int lag);

struct TestItem {
    std::int64_t index = 0;
    std::uint64_t seed = 0;
    Theta theta{};
    std::vector<SummaryVector> summaries; // one per table lag
};

/// Test item i of a study over `meta`, drawn like a table row but on the
/// test-set stream.
TestItem simulate_test_item(const TableMetadata& meta, std::int64_t index);

struct StudyOptions {
    std::vector<SummarySet> sets{SummarySet::longitudinal, SummarySet::tlfb, SummarySet::all};
    int test_size = 200;
    double accept_fraction = 0.01;
};

struct RmseCell {
    int lag = 0;
    SummarySet set = SummarySet::all;
    bool adjusted = false;
    Param param = Param::mu;
    double rmse = 0.0;
    double se = 0.0;          ///< delta-method standard error across test items
    std::int64_t used = 0;
    std::int64_t skipped = 0; ///< items lacking a summary the design needs
};

struct ItemEstimate {
    std::int64_t item = 0;
    int lag = 0;
    SummarySet set = SummarySet::all;
    bool adjusted = false;
    Theta truth{};
    Theta estimate{}; ///< posterior mean
};

struct StudyResult {
    std::vector<RmseCell> cells;
    std::vector<ItemEstimate> estimates;

    /// Cell for (lag, set, adjusted, param); throws if absent.
    const RmseCell& cell(int lag, SummarySet set, bool adjusted, Param param) const;
};

/// For every table lag, summary set and item of the test set, fits the
/// item by rejection (with and without regression adjustment) and
/// aggregates the posterior-mean errors. `table.meta.lags` must be set.
StudyResult rmse_study_serial(const ReferenceTable& table, const StudyOptions& options);
StudyResult rmse_study(const ReferenceTable& table, const StudyOptions& options, int workers = 0);

} // namespace netabc
