#include "netabc/study.hpp"

#include <cmath>
#include <omp.h>

#include "netabc/error.hpp"

namespace netabc {

namespace {

SummaryVector predictive_replicate(std::span<const Theta> samples, double n, const SurveyDesign& design,
                                   const SimulatorSettings& settings, std::uint64_t seed, int r)
{
    RandomStream rng(derive_seed(seed, streams::predictive, static_cast<std::uint64_t>(r)));
    const std::size_t pick = samples.size() == 1 ? 0 : rng.uniform_index(samples.size());
    return run_survey(params_of(samples[pick], n), design, settings, rng);
}

void check_predictive(std::span<const Theta> samples, int replicates)
{
    if (samples.empty()) {
        throw EmptyPosterior("posterior predictive needs at least one sample");
    }
    if (replicates < 0) {
        throw InvalidArgument("replicate count must be non-negative");
    }
}

struct Fit {
    bool skipped = true;
    Theta raw{};
    Theta adjusted{};
};

// Fits of one item: index [view * sets + s].
std::vector<Fit> fit_item(const ReferenceTable& table, const StudyOptions& options, const TestItem& item)
{
    const auto& lags = table.meta.lags;
    std::vector<Fit> fits(lags.size() * options.sets.size());
    for (std::size_t v = 0; v < lags.size(); ++v) {
        const NormalizedSummaries observed = normalize_summaries(item.summaries[v]);
        for (std::size_t s = 0; s < options.sets.size(); ++s) {
            const SummaryMask selection = summary_mask(options.sets[s]) & producible_summaries(lags[v]);
            Fit& fit = fits[v * options.sets.size() + s];
            if (!observed.present.contains_all(selection)) {
                continue;
            }
            Posterior post = abc_reject(table, static_cast<int>(v), observed, selection, options.accept_fraction, false);
            fit.raw = posterior_mean(post);
            regression_adjust(post, observed);
            fit.adjusted = posterior_mean(post);
            fit.skipped = false;
        }
    }
    return fits;
}

void check_study(const ReferenceTable& table, const StudyOptions& options)
{
    if (table.meta.lags.empty()) {
        throw InvalidArgument("the RMSE study needs a multi-lag reference table");
    }
    if (options.sets.empty() || options.test_size < 1) {
        throw InvalidArgument("the RMSE study needs at least one summary set and one test item");
    }
}

StudyResult aggregate(const ReferenceTable& table, const StudyOptions& options, const std::vector<TestItem>& items,
                      const std::vector<std::vector<Fit>>& fits)
{
    StudyResult result;
    const auto& lags = table.meta.lags;
    for (std::size_t v = 0; v < lags.size(); ++v) {
        for (std::size_t s = 0; s < options.sets.size(); ++s) {
            for (const bool adjusted : {false, true}) {
                std::array<std::vector<double>, kParamCount> sq;
                std::int64_t skipped = 0;
                for (std::size_t i = 0; i < items.size(); ++i) {
                    const Fit& fit = fits[i][v * options.sets.size() + s];
                    if (fit.skipped) {
                        ++skipped;
                        continue;
                    }
                    const Theta& est = adjusted ? fit.adjusted : fit.raw;
                    result.estimates.push_back({items[i].index, lags[v], options.sets[s], adjusted, items[i].theta, est});
                    for (std::size_t k = 0; k < kParamCount; ++k) {
                        const double e = est[k] - items[i].theta[k];
                        sq[k].push_back(e * e);
                    }
                }
                for (const Param p : kAllParams) {
                    const auto& errors = sq[static_cast<std::size_t>(p)];
                    RmseCell cell{lags[v], options.sets[s], adjusted, p, 0.0, 0.0,
                                  static_cast<std::int64_t>(errors.size()), skipped};
                    if (!errors.empty()) {
                        double mse = 0.0;
                        for (const double e : errors) {
                            mse += e;
                        }
                        mse /= static_cast<double>(errors.size());
                        double var = 0.0;
                        for (const double e : errors) {
                            var += (e - mse) * (e - mse);
                        }
                        const double se_mse =
                            errors.size() > 1 ? std::sqrt(var / static_cast<double>(errors.size() - 1) /
                                                          static_cast<double>(errors.size()))
                                              : 0.0;
                        cell.rmse = std::sqrt(mse);
                        cell.se = cell.rmse > 0.0 ? se_mse / (2.0 * cell.rmse) : 0.0;
                    }
                    result.cells.push_back(cell);
                }
            }
        }
    }
    return result;
}

} // namespace

std::vector<SummaryVector> posterior_predictive_serial(std::span<const Theta> samples, double n,
                                                       const SurveyDesign& design, const SimulatorSettings& settings,
                                                       int replicates, std::uint64_t seed)
{
    check_predictive(samples, replicates);
    std::vector<SummaryVector> out;
    out.reserve(static_cast<std::size_t>(replicates));
    for (int r = 0; r < replicates; ++r) {
        out.push_back(predictive_replicate(samples, n, design, settings, seed, r));
    }
    return out;
}

std::vector<SummaryVector> posterior_predictive(std::span<const Theta> samples, double n, const SurveyDesign& design,
                                                const SimulatorSettings& settings, int replicates, std::uint64_t seed,
                                                int workers)
{
    check_predictive(samples, replicates);
    std::vector<SummaryVector> out(static_cast<std::size_t>(replicates));
    const int threads = workers > 0 ? workers : omp_get_max_threads();
    bool failed = false;
    std::string failure;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int r = 0; r < replicates; ++r) {
        try {
            out[static_cast<std::size_t>(r)] = predictive_replicate(samples, n, design, settings, seed, r);
        } catch (const std::exception& e) {
#pragma omp critical(netabc_ppc_failure)
            if (!failed) {
                failed = true;
                failure = "predictive replicate " + std::to_string(r) + " failed: " + e.what();
            }
        }
    }
    if (failed) {
        throw Error(failure);
    }
    return out;
}

SummaryMask producible_summaries(int lag)
{
    SummaryMask all = summary_mask(SummarySet::all);
    if (lag > 0) {
        return all;
    }
    return all & SummaryMask(static_cast<std::uint16_t>(
                     ~((1u << index_of(Summary::frac_retained_nodes)) | (1u << index_of(Summary::frac_retained_edges)))));
}

TestItem simulate_test_item(const TableMetadata& meta, std::int64_t index)
{
    TestItem item;
    item.index = index;
    item.seed = derive_seed(meta.master_seed, streams::test_set, static_cast<std::uint64_t>(index));
    RandomStream rng(item.seed);
    const ModelParams theta = sample_prior(meta.prior, rng);
    item.theta = theta_of(theta);
    if (meta.lags.empty()) {
        item.summaries.push_back(run_survey(theta, meta.design, meta.settings, rng));
    } else {
        item.summaries = run_survey_lags(theta, meta.design, meta.lags, meta.settings, rng);
    }
    return item;
}

const RmseCell& StudyResult::cell(int lag, SummarySet set, bool adjusted, Param param) const
{
    for (const RmseCell& c : cells) {
        if (c.lag == lag && c.set == set && c.adjusted == adjusted && c.param == param) {
            return c;
        }
    }
    throw InvalidArgument("no RMSE cell for lag " + std::to_string(lag));
}

StudyResult rmse_study_serial(const ReferenceTable& table, const StudyOptions& options)
{
    check_study(table, options);
    std::vector<TestItem> items;
    std::vector<std::vector<Fit>> fits;
    for (int i = 0; i < options.test_size; ++i) {
        items.push_back(simulate_test_item(table.meta, i));
        fits.push_back(fit_item(table, options, items.back()));
    }
    return aggregate(table, options, items, fits);
}

StudyResult rmse_study(const ReferenceTable& table, const StudyOptions& options, int workers)
{
    check_study(table, options);
    const auto count = static_cast<std::size_t>(options.test_size);
    std::vector<TestItem> items(count);
    std::vector<std::vector<Fit>> fits(count);
    const int threads = workers > 0 ? workers : omp_get_max_threads();
    bool failed = false;
    std::string failure;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < options.test_size; ++i) {
        try {
            items[static_cast<std::size_t>(i)] = simulate_test_item(table.meta, i);
            fits[static_cast<std::size_t>(i)] = fit_item(table, options, items[static_cast<std::size_t>(i)]);
        } catch (const std::exception& e) {
#pragma omp critical(netabc_study_failure)
            if (!failed) {
                failed = true;
                failure = "test item " + std::to_string(i) + " failed: " + e.what();
            }
        }
    }
    if (failed) {
        throw Error(failure);
    }
    return aggregate(table, options, items, fits);
}

} // namespace netabc
