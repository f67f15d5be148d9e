#include <doctest.h>

#include <cmath>

#include "netabc/error.hpp"
#include "netabc/study.hpp"

using namespace netabc;

namespace {

TableMetadata tiny_meta(std::int64_t rows)
{
    TableMetadata m;
    m.prior.n_fixed = 150.0;
    m.design.m = 40;
    m.design.tlfb_window = 26;
    m.settings.burn_in = 80;
    m.settings.retention = 26;
    m.lags = {0, 4, 13};
    m.master_seed = 31;
    m.rows = rows;
    return m;
}

} // namespace

TEST_SUITE("study")
{
    TEST_CASE("lag zero cannot produce retention")
    {
        CHECK_FALSE(producible_summaries(0).contains(Summary::frac_retained_nodes));
        CHECK_FALSE(producible_summaries(0).contains(Summary::frac_retained_edges));
        CHECK(producible_summaries(0).contains(Summary::frac_paired));
        CHECK(producible_summaries(4) == summary_mask(SummarySet::all));
    }

    TEST_CASE("predictive replicates use their own sub-seeds")
    {
        ModelParams p;
        p.n = 200;
        p.mu = 0.01;
        p.rho = 0.05;
        p.sigma = 0.03;
        p.omega0 = 0.3;
        const std::vector<Theta> one{theta_of(p)};
        SurveyDesign d;
        d.m = 50;
        const SimulatorSettings s{100, 52};
        const auto reps = posterior_predictive_serial(one, 200, d, s, 2, 5);
        REQUIRE(reps.size() == 2);
        CHECK(reps[0].values != reps[1].values);
        RandomStream rng(derive_seed(5, streams::predictive, 1));
        CHECK(run_survey(p, d, s, rng).values == reps[1].values);
        const auto par = posterior_predictive(one, 200, d, s, 2, 5, 2);
        CHECK(par[0].values == reps[0].values);
        CHECK(par[1].values == reps[1].values);
    }

    TEST_CASE("no formation means nobody is paired")
    {
        ModelParams p;
        p.n = 200;
        p.mu = 0.01;
        p.omega0 = 0.2;
        const std::vector<Theta> one{theta_of(p)};
        SurveyDesign d;
        d.m = 50;
        for (const SummaryVector& v : posterior_predictive(one, 200, d, SimulatorSettings{100, 52}, 20, 6)) {
            CHECK(*v[Summary::frac_paired] == 0.0);
        }
        CHECK_THROWS_AS(posterior_predictive(std::vector<Theta>{}, 200, d, SimulatorSettings{}, 2, 1), EmptyPosterior);
    }

    TEST_CASE("test items are independent of table rows")
    {
        const TableMetadata meta = tiny_meta(1);
        const TestItem a = simulate_test_item(meta, 0);
        const TestItem b = simulate_test_item(meta, 0);
        CHECK(a.theta == b.theta);
        CHECK(a.summaries.size() == 3);
        CHECK(a.seed == derive_seed(31, streams::test_set, 0));
        CHECK(a.theta != theta_of(simulate_row(meta, 0).theta));
    }

    TEST_CASE("a test item matched to its own row has no error")
    {
        TableMetadata meta = tiny_meta(200);
        ReferenceTable table = build_reference_table(meta);
        const TestItem item = simulate_test_item(meta, 0);
        table.thetas[17] = item.theta;
        for (std::size_t v = 0; v < table.views.size(); ++v) {
            const NormalizedSummaries n = normalize_summaries(item.summaries[v]);
            std::copy(n.values.begin(), n.values.end(), table.views[v].values.begin() + 17 * kSummaryCount);
            table.views[v].present[17] = n.present.bits();
        }
        StudyOptions options;
        options.test_size = 1;
        options.accept_fraction = 0.001;
        const StudyResult r = rmse_study_serial(table, options);
        for (const int lag : {0, 4, 13}) {
            for (const Param p : kAllParams) {
                const RmseCell& c = r.cell(lag, SummarySet::all, false, p);
                CHECK(c.used == 1);
                CHECK(c.rmse == 0.0);
            }
        }
        CHECK_THROWS_AS(r.cell(52, SummarySet::all, false, Param::mu), InvalidArgument);
    }

    TEST_CASE("parallel study matches the serial study")
    {
        const ReferenceTable table = build_reference_table(tiny_meta(400));
        StudyOptions options;
        options.test_size = 12;
        options.accept_fraction = 0.05;
        const StudyResult a = rmse_study_serial(table, options);
        const StudyResult b = rmse_study(table, options, 3);
        REQUIRE(a.cells.size() == b.cells.size());
        REQUIRE(a.cells.size() == 3u * 3u * 2u * kParamCount);
        for (std::size_t i = 0; i < a.cells.size(); ++i) {
            CHECK(a.cells[i].rmse == b.cells[i].rmse);
            CHECK(a.cells[i].se == b.cells[i].se);
            CHECK(a.cells[i].used + a.cells[i].skipped == 12);
        }
    }

    TEST_CASE("the study needs a multi-lag table")
    {
        TableMetadata meta = tiny_meta(10);
        meta.lags.clear();
        const ReferenceTable table = build_reference_table(meta);
        CHECK_THROWS_AS(rmse_study(table, StudyOptions{}), InvalidArgument);
    }
}
