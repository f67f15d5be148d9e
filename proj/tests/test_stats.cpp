#include <doctest.h>

#include <cmath>
#include <vector>

#include "netabc/error.hpp"
#include "netabc/random.hpp"
#include "netabc/stats.hpp"

using namespace netabc;

TEST_SUITE("stats")
{
    TEST_CASE("moments")
    {
        const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
        CHECK(stats::mean(x) == 2.5);
        CHECK(stats::sd(x) == doctest::Approx(std::sqrt(5.0 / 3.0)));
        CHECK(stats::standard_error(x) == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
        const std::vector<double> one{7.0};
        CHECK(stats::sd(one) == 0.0);
    }

    TEST_CASE("linear-interpolation quantiles")
    {
        std::vector<double> x;
        for (int i = 10; i >= 1; --i) {
            x.push_back(i / 10.0);
        }
        CHECK(stats::quantile(x, 0.5) == doctest::Approx(0.55));
        CHECK(stats::quantile(x, 0.0) == doctest::Approx(0.1));
        CHECK(stats::quantile(x, 1.0) == doctest::Approx(1.0));
        CHECK(stats::quantile(x, 0.025) == doctest::Approx(0.1 + 0.225 * 0.1));
        const std::vector<double> single{0.3};
        const std::vector<double> levels{0.025, 0.5, 0.975};
        for (const double q : stats::quantiles(single, levels)) {
            CHECK(q == 0.3);
        }
    }

    TEST_CASE("two-sample KS")
    {
        const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
        const std::vector<double> b{1.0, 2.0, 3.0, 4.0};
        CHECK(stats::ks_two_sample(a, b).statistic == 0.0);
        CHECK(stats::ks_two_sample(a, b).p_value == doctest::Approx(1.0));
        const std::vector<double> c{5.0, 6.0, 7.0, 8.0};
        CHECK(stats::ks_two_sample(a, c).statistic == 1.0);

        // Two large samples from the same distribution rarely reject; from
        // shifted distributions they always do.
        RandomStream rng(1);
        std::vector<double> u;
        std::vector<double> v;
        std::vector<double> w;
        for (int i = 0; i < 2000; ++i) {
            u.push_back(rng.uniform());
            v.push_back(rng.uniform());
            w.push_back(rng.uniform() + 0.1);
        }
        CHECK(stats::ks_two_sample(u, v).p_value > 0.01);
        CHECK(stats::ks_two_sample(u, w).p_value < 1e-6);
    }

    TEST_CASE("Kolmogorov distribution tail")
    {
        CHECK(stats::kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
        CHECK(stats::kolmogorov_survival(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
        CHECK(stats::kolmogorov_survival(0.0) == 1.0);
    }

    TEST_CASE("one-sample KS")
    {
        std::vector<double> x;
        for (int i = 0; i < 100; ++i) {
            x.push_back((i + 0.5) / 100.0);
        }
        const auto r = stats::ks_one_sample(x, [](double u) { return u; });
        CHECK(r.statistic == doctest::Approx(0.005));
        CHECK(r.p_value > 0.99);
    }

    TEST_CASE("chi-square tail")
    {
        CHECK(stats::chi_square_survival(3.841459, 1) == doctest::Approx(0.05).epsilon(1e-5));
        CHECK(stats::chi_square_survival(30.14353, 19) == doctest::Approx(0.05).epsilon(1e-5));
        CHECK(stats::chi_square_survival(0.0, 5) == 1.0);
    }

    TEST_CASE("Gaussian KDE integrates to about one")
    {
        RandomStream rng(2);
        std::vector<double> x;
        for (int i = 0; i < 500; ++i) {
            x.push_back(rng.uniform());
        }
        const double h = stats::silverman_bandwidth(x);
        CHECK(h > 0.0);
        const auto grid = stats::gaussian_kde(x, -1.0, 2.0, 301);
        REQUIRE(grid.size() == 301);
        CHECK(grid.front().x == -1.0);
        CHECK(grid.back().x == 2.0);
        double area = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            area += 0.5 * (grid[i].density + grid[i - 1].density) * (grid[i].x - grid[i - 1].x);
        }
        CHECK(area == doctest::Approx(1.0).epsilon(1e-3));
    }

    TEST_CASE("Silverman bandwidth formula")
    {
        const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
        const double sd = std::sqrt(2.5);
        const double iqr = 4.0 - 2.0;
        CHECK(stats::silverman_bandwidth(x) == doctest::Approx(0.9 * std::min(sd, iqr / 1.34) * std::pow(5.0, -0.2)));
    }
}
