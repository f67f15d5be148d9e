#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "netabc/analytic.hpp"
#include "netabc/error.hpp"
#include "netabc/survey.hpp"

using namespace netabc;

namespace {

// Advances an edge-free dynamics so the state's clock reads `steps`.
void tick(NetworkState& s, int steps)
{
    ModelParams still;
    still.n = 1.0;
    RandomStream rng(0);
    EventLog scratch;
    for (int i = 0; i < steps; ++i) {
        step(s, still, rng, scratch);
    }
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& x)
{
    MeanSe r;
    for (const double v : x) {
        r.mean += v;
    }
    r.mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (const double v : x) {
        ss += (v - r.mean) * (v - r.mean);
    }
    r.se = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
    return r;
}

SimulatorSettings short_burn() { return SimulatorSettings{200, 52}; }

} // namespace

TEST_SUITE("survey")
{
    TEST_CASE("sample_cohort edge cases")
    {
        RandomStream rng(1);
        const NetworkState s = NetworkState::with_isolated_nodes(5);
        CHECK(sample_cohort(s, 5, rng) == Cohort{0, 1, 2, 3, 4});
        CHECK(sample_cohort(s, 0, rng).empty());
        CHECK_THROWS_AS(sample_cohort(s, 6, rng), InvalidArgument);
    }

    TEST_CASE("sample_cohort is uniform")
    {
        RandomStream rng(2);
        const NetworkState s = NetworkState::with_isolated_nodes(10);
        std::map<NodeId, int> hits;
        for (int t = 0; t < 10000; ++t) {
            const Cohort c = sample_cohort(s, 1, rng);
            REQUIRE(c.size() == 1);
            ++hits[c[0]];
        }
        for (NodeId id = 0; id < 10; ++id) {
            CHECK(std::abs(hits[id] / 10000.0 - 0.1) < 0.01);
        }

        std::map<NodeId, int> triples;
        for (int t = 0; t < 10000; ++t) {
            const Cohort c = sample_cohort(s, 3, rng);
            REQUIRE(c.size() == 3);
            REQUIRE(c[0] < c[1]);
            REQUIRE(c[1] < c[2]);
            for (const NodeId id : c) {
                ++triples[id];
            }
        }
        for (NodeId id = 0; id < 10; ++id) {
            CHECK(std::abs(triples[id] / 10000.0 - 0.3) < 0.02);
        }
    }

    TEST_CASE("two respondents in one ten-week relationship")
    {
        NetworkState s = NetworkState::with_isolated_nodes(2);
        tick(s, 20);
        REQUIRE(s.add_steady_edge(0, 1, 10));
        const EventLog log(52, 0);
        const SummaryVector v = cross_sectional_summaries(s, log, Cohort{0, 1}, SurveyDesign{});
        CHECK(*v[Summary::frac_paired] == 1.0);
        CHECK(*v[Summary::frac_concurrent] == 0.0);
        CHECK(*v[Summary::mean_steady_duration] == doctest::Approx(70.0));
        CHECK(v.count(Summary::mean_steady_duration) == 1);
        CHECK_FALSE(v[Summary::mean_casual_gap_single]);
        CHECK_FALSE(v[Summary::mean_casual_gap_paired]);
        CHECK(*v[Summary::frac_paired_casual_lastweek] == 0.0);
        // Nobody is single, so the singles' question has no respondents.
        CHECK_FALSE(v[Summary::frac_single_casual_lastweek]);
        CHECK_FALSE(v[Summary::frac_retained_nodes]);
        CHECK_FALSE(v[Summary::frac_retained_edges]);
    }

    TEST_CASE("star with a concurrent centre")
    {
        NetworkState s = NetworkState::with_isolated_nodes(3);
        tick(s, 60);
        REQUIRE(s.add_steady_edge(0, 1, 50));
        REQUIRE(s.add_steady_edge(0, 2, 1));
        const EventLog log(52, 0);
        const SummaryVector v = cross_sectional_summaries(s, log, Cohort{0, 1, 2}, SurveyDesign{});
        CHECK(*v[Summary::frac_paired] == 1.0);
        CHECK(*v[Summary::frac_concurrent] == doctest::Approx(1.0 / 3.0));
        // 10 weeks and 59 weeks censored at 52.
        CHECK(*v[Summary::mean_steady_duration] == doctest::Approx((10.0 + 52.0) / 2.0 * 7.0));
    }

    TEST_CASE("dissolved relationships inside the window count once")
    {
        NetworkState s = NetworkState::with_isolated_nodes(4);
        tick(s, 100);
        EventLog log(52, 0);
        log.record_dissolution(DissolvedEdge{0, 1, 70, 90, DissolutionCause::natural});
        log.record_dissolution(DissolvedEdge{2, 3, 10, 40, DissolutionCause::natural}); // before the window
        const SummaryVector v = cross_sectional_summaries(s, log, Cohort{0, 1, 2, 3}, SurveyDesign{});
        CHECK(*v[Summary::frac_paired] == 0.0);
        CHECK_FALSE(v[Summary::frac_concurrent]);
        CHECK(*v[Summary::mean_steady_duration] == doctest::Approx(140.0));
        CHECK(v.count(Summary::mean_steady_duration) == 1);
    }

    TEST_CASE("casual gaps split respondent time by status")
    {
        // Node 0 is single for the whole window and has 4 contacts; node 1
        // is paired from week 27 of the window onwards and has 2 contacts
        // while paired and 1 while single.
        NetworkState s = NetworkState::with_isolated_nodes(4);
        tick(s, 52);
        REQUIRE(s.add_steady_edge(1, 3, 27));
        EventLog log(52, 0);
        for (Step t = 1; t <= 52; ++t) {
            std::vector<CasualEdge> edges;
            if (t == 5 || t == 15 || t == 25 || t == 52) {
                edges.push_back(CasualEdge{0, 2});
            }
            if (t == 10 || t == 30 || t == 40) {
                edges.push_back(CasualEdge{1, 2});
            }
            log.record_casual(t, edges);
        }
        const SummaryVector v = cross_sectional_summaries(s, log, Cohort{0, 1}, SurveyDesign{});
        // Single weeks: 52 (node 0) + 26 (node 1) with 5 contacts.
        CHECK(*v[Summary::mean_casual_gap_single] == doctest::Approx(78.0 * 7.0 / 5.0));
        CHECK(v.count(Summary::mean_casual_gap_single) == 5);
        CHECK(*v[Summary::mean_casual_gap_paired] == doctest::Approx(26.0 * 7.0 / 2.0));
        CHECK(*v[Summary::frac_single_casual_lastweek] == 1.0);
        CHECK(*v[Summary::frac_paired_casual_lastweek] == 0.0);
    }

    TEST_CASE("log must cover the recall window")
    {
        NetworkState s = NetworkState::with_isolated_nodes(2);
        tick(s, 100);
        const EventLog late(52, 80);
        CHECK_THROWS_AS(cross_sectional_summaries(s, late, Cohort{0}, SurveyDesign{}), InvalidArgument);
    }

    TEST_CASE("design validation")
    {
        SurveyDesign d;
        CHECK_NOTHROW(d.validate(52));
        d.tlfb_window = 60;
        CHECK_THROWS_AS(d.validate(52), InvalidArgument);
        d = SurveyDesign{};
        d.waves = 2;
        d.lag = 0;
        CHECK_THROWS_AS(d.validate(52), InvalidArgument);
        d = SurveyDesign{};
        d.m = 0;
        CHECK_THROWS_AS(d.validate(52), InvalidArgument);
        d = SurveyDesign{};
        d.dropout = 1.5;
        CHECK_THROWS_AS(d.validate(52), InvalidArgument);
    }

    TEST_CASE("identical states retain everyone")
    {
        NetworkState s = NetworkState::with_isolated_nodes(6);
        REQUIRE(s.add_steady_edge(0, 1, 0));
        REQUIRE(s.add_steady_edge(1, 4, 0));
        const Cohort cohort{0, 1, 2};
        const auto edges = cohort_edges(s, cohort);
        CHECK(edges.size() == 2);
        RandomStream rng(3);
        const LongitudinalResult r = longitudinal_summaries(cohort, s, edges, SurveyDesign{}, rng);
        CHECK(*r.summaries[Summary::frac_retained_nodes] == 1.0);
        CHECK(*r.summaries[Summary::frac_retained_edges] == 1.0);
        CHECK(r.next_cohort == cohort);
    }

    TEST_CASE("a departed cohort leaves edge retention absent")
    {
        NetworkState before = NetworkState::with_isolated_nodes(4);
        REQUIRE(before.add_steady_edge(0, 1, 0));
        const Cohort cohort{0, 1};
        const auto edges = cohort_edges(before, cohort);
        ModelParams gone;
        gone.n = 1.0;
        gone.mu = 1.0;
        RandomStream rng(4);
        EventLog log;
        NetworkState after = before;
        step(after, gone, rng, log);
        const LongitudinalResult r = longitudinal_summaries(cohort, after, edges, SurveyDesign{}, rng);
        CHECK(*r.summaries[Summary::frac_retained_nodes] == 0.0);
        CHECK_FALSE(r.summaries[Summary::frac_retained_edges]);
        CHECK(r.next_cohort.empty());
    }

    TEST_CASE("a re-formed pair is not a retained edge")
    {
        NetworkState before = NetworkState::with_isolated_nodes(2);
        REQUIRE(before.add_steady_edge(0, 1, 0));
        NetworkState after = NetworkState::with_isolated_nodes(2);
        REQUIRE(after.add_steady_edge(0, 1, 5));
        const Cohort cohort{0};
        RandomStream rng(5);
        const LongitudinalResult r =
            longitudinal_summaries(cohort, after, cohort_edges(before, cohort), SurveyDesign{}, rng);
        CHECK(*r.summaries[Summary::frac_retained_edges] == 0.0);
    }

    TEST_CASE("single-wave surveys have no retention entries")
    {
        ModelParams p;
        p.n = 300;
        p.mu = 0.01;
        p.rho = 0.05;
        p.sigma = 0.03;
        p.xi = 0.2;
        p.omega0 = 0.3;
        p.omega1 = 0.1;
        SurveyDesign d;
        d.m = 100;
        const SummaryVector v = run_survey(p, d, short_burn(), 7);
        CHECK_FALSE(v[Summary::frac_retained_nodes]);
        CHECK_FALSE(v[Summary::frac_retained_edges]);
        CHECK(v[Summary::frac_paired]);
        CHECK(v.count(Summary::frac_paired) == 100);
    }

    TEST_CASE("closed population gives equal wave weights")
    {
        ModelParams p;
        p.n = 300;
        p.rho = 0.05;
        p.sigma = 0.03;
        SurveyDesign d;
        d.m = 100;
        d.waves = 2;
        d.lag = 10;
        const SummaryVector v = run_survey(p, d, short_burn(), 8);
        CHECK(*v[Summary::frac_retained_nodes] == 1.0);
        CHECK(v.count(Summary::frac_retained_nodes) == 100);
        CHECK(v.count(Summary::frac_paired) == 200);
    }

    TEST_CASE("multi-lag surveys agree with separate two-wave surveys")
    {
        ModelParams p;
        p.n = 400;
        p.mu = 0.01;
        p.rho = 0.05;
        p.sigma = 0.03;
        p.xi = 0.3;
        p.omega0 = 0.3;
        p.omega1 = 0.1;
        SurveyDesign d;
        d.m = 100;
        const std::vector<int> lags{0, 4, 13, 26};
        RandomStream rng(9);
        const auto views = run_survey_lags(p, d, lags, short_burn(), rng);
        REQUIRE(views.size() == lags.size());
        for (std::size_t i = 0; i < lags.size(); ++i) {
            SurveyDesign di = d;
            di.waves = lags[i] == 0 ? 1 : 2;
            di.lag = lags[i];
            const SummaryVector direct = run_survey(p, di, short_burn(), 9);
            CAPTURE(lags[i]);
            CHECK(views[i].values == direct.values);
            CHECK(views[i].counts == direct.counts);
        }
        const std::vector<int> unsorted{13, 4};
        RandomStream again(9);
        CHECK_THROWS_AS(run_survey_lags(p, d, unsorted, short_burn(), again), InvalidArgument);
    }

    TEST_CASE("summaries respect their ranges for random parameters")
    {
        RandomStream meta(10);
        SimulatorSettings settings{120, 52};
        for (int trial = 0; trial < 1000; ++trial) {
            ModelParams p;
            p.n = 60.0;
            p.mu = 0.05 * meta.uniform();
            p.rho = meta.uniform();
            p.sigma = 0.3 * meta.uniform();
            p.xi = trial % 4 == 0 ? 0.0 : meta.uniform();
            p.omega0 = meta.uniform();
            p.omega1 = meta.uniform();
            SurveyDesign d;
            d.m = 20;
            d.waves = 2;
            d.lag = 1 + static_cast<int>(meta.uniform_index(30));
            d.tlfb_window = 1 + static_cast<int>(meta.uniform_index(52));
            SummaryVector v;
            try {
                v = run_survey(p, d, settings, derive_seed(10, 0, static_cast<std::uint64_t>(trial)));
            } catch (const InvalidArgument&) {
                continue; // population fell below m
            }
            for (int k = 0; k < kSummaryCount; ++k) {
                const Summary s = static_cast<Summary>(k);
                if (!v[s]) {
                    continue;
                }
                REQUIRE(*v[s] >= 0.0);
                REQUIRE(v.count(s) > 0);
                if (is_duration(s)) {
                    continue;
                }
                REQUIRE(*v[s] <= 1.0);
            }
            if (v[Summary::mean_steady_duration]) {
                REQUIRE(*v[Summary::mean_steady_duration] <= d.tlfb_window * kDaysPerWeek);
            }
            if (p.xi == 0.0 && v[Summary::frac_concurrent]) {
                REQUIRE(*v[Summary::frac_concurrent] == 0.0);
            }
            if (v[Summary::frac_paired] && *v[Summary::frac_paired] == 0.0) {
                REQUIRE_FALSE(v[Summary::frac_concurrent]);
            }
        }
    }

    TEST_CASE("singles answer yes to the casual question with probability omega0")
    {
        ModelParams p;
        p.n = 1000;
        p.mu = 0.01;
        p.omega0 = 0.3;
        SurveyDesign d;
        d.m = 403;
        std::vector<double> answers;
        for (std::uint64_t r = 0; r < 200; ++r) {
            answers.push_back(*run_survey(p, d, short_burn(), derive_seed(11, 0, r))[Summary::frac_single_casual_lastweek]);
        }
        const MeanSe m = mean_se(answers);
        CHECK(std::abs(m.mean - p.omega0) < 3.0 * m.se);
    }

    TEST_CASE("node retention follows the migration survival")
    {
        ModelParams p;
        p.n = 500;
        p.mu = 0.01;
        SurveyDesign d;
        d.m = 100;
        d.waves = 2;
        d.lag = 26;
        std::vector<double> kept;
        for (std::uint64_t r = 0; r < 500; ++r) {
            kept.push_back(*run_survey(p, d, short_burn(), derive_seed(12, 0, r))[Summary::frac_retained_nodes]);
        }
        const MeanSe m = mean_se(kept);
        CHECK(std::abs(m.mean - analytic::expected_retained_nodes(p.mu, 26.0)) < 3.0 * m.se);
        CHECK(analytic::expected_retained_nodes(p.mu, 26.0) == doctest::Approx(std::pow(0.99, 26.0)));
    }

    TEST_CASE("second-wave cohort shrinks like the migration survival")
    {
        ModelParams p;
        p.n = 500;
        p.mu = 0.001;
        SurveyDesign d;
        d.m = 100;
        d.waves = 2;
        d.lag = 52;
        std::vector<double> size;
        for (std::uint64_t r = 0; r < 300; ++r) {
            const SummaryVector v = run_survey(p, d, short_burn(), derive_seed(13, 0, r));
            // Pooled respondent count is m plus the second-wave cohort.
            size.push_back(static_cast<double>(v.count(Summary::frac_paired) - d.m));
        }
        const MeanSe m = mean_se(size);
        CHECK(std::abs(m.mean - d.m * std::pow(0.999, 52.0)) < 3.0 * m.se);
    }

    TEST_CASE("dropout removes respondents and their edges from follow-up")
    {
        ModelParams p;
        p.n = 500;
        p.rho = 0.05;
        p.sigma = 0.02;
        SurveyDesign d;
        d.m = 200;
        d.waves = 2;
        d.lag = 4;
        d.dropout = 0.25;
        std::vector<double> kept;
        for (std::uint64_t r = 0; r < 50; ++r) {
            kept.push_back(*run_survey(p, d, short_burn(), derive_seed(14, 0, r))[Summary::frac_retained_nodes]);
        }
        const MeanSe m = mean_se(kept);
        CHECK(std::abs(m.mean - 0.75) < 3.0 * m.se);
    }
}
