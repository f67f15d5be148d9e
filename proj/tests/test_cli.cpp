#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "netabc/kvfile.hpp"

namespace fs = std::filesystem;
using netabc::read_file;
using netabc::write_file_atomic;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "netabc");
    std::ostringstream out;
    std::ostringstream err;
    const int code = netabc::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "netabc-cli-test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Small population and short windows so every command runs in well under a
// second.
std::vector<std::string> small(const fs::path& out, std::vector<std::string> args)
{
    std::vector<std::string> base{"--out", out.string(), "--n-fixed", "150", "--m", "40", "--tlfb-window", "26",
                                  "--retention", "26", "--burn-in", "80", "--workers", "1"};
    base.insert(base.end(), args.begin(), args.end());
    return base;
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("convert reproduces the worked examples")
    {
        const fs::path dir = fresh_dir("convert");
        Result r = run({"--out", dir.string(), "convert", "--from-daily", "0.01", "--scale", "7"});
        CHECK(r.code == 0);
        CHECK(r.out == "0.068\n");
        r = run({"--out", dir.string(), "convert", "--rate", "0.73", "--period", "52", "--decimals", "2"});
        CHECK(r.out == "0.01\n");
        r = run({"--out", dir.string(), "convert", "--rate", "0.73", "--period", "52", "--decimals", "4"});
        CHECK(r.out == "0.0140\n");
        r = run({"--out", dir.string(), "convert", "--inverse-odds", "0.5"});
        CHECK(r.out == "1.000\n");
        r = run({"--out", dir.string(), "convert", "--from-inverse-odds", "24.9", "--decimals", "4"});
        CHECK(r.out == "0.0386\n");
        r = run({"--out", dir.string(), "convert", "--to-daily", "0.068", "--scale", "7"});
        CHECK(r.out == "0.010\n");
        CHECK(fs::exists(dir / "manifest-convert.txt"));
        r = run({"--out", dir.string(), "convert", "--rate", "1", "--inverse-odds", "0.5"});
        CHECK(r.code == netabc::cli::kInvalid);
    }

    TEST_CASE("usage errors")
    {
        CHECK(run({}).code == netabc::cli::kUsage);
        CHECK(run({"convert", "--bogus", "1"}).code == netabc::cli::kUsage);
        CHECK(run({"frobnicate"}).code == netabc::cli::kUsage);
        CHECK(run({"abc"}).code == netabc::cli::kUsage);
        CHECK(run({"--help"}).code == 0);
    }

    TEST_CASE("empty and missing posterior files")
    {
        const fs::path dir = fresh_dir("quantiles");
        write_file_atomic(dir / "empty.csv", "");
        Result r = run({"--out", dir.string(), "abc", "quantiles", "--samples", (dir / "empty.csv").string()});
        CHECK(r.code == netabc::cli::kEmptyPosterior);
        CHECK(r.err.find("empty posterior") != std::string::npos);
        r = run({"--out", dir.string(), "abc", "quantiles", "--samples", (dir / "absent.csv").string()});
        CHECK(r.code == netabc::cli::kIo);
    }

    TEST_CASE("invalid parameters")
    {
        const fs::path dir = fresh_dir("invalid");
        CHECK(run(small(dir, {"survey", "--rho", "1.5"})).code == netabc::cli::kInvalid);
        CHECK(run(small(dir, {"--tlfb-window", "60", "survey"})).code == netabc::cli::kUsage);
        CHECK(run({"--out", dir.string(), "--tlfb-window", "60", "survey", "--n", "100"}).code ==
              netabc::cli::kInvalid);
    }

    TEST_CASE("surveys are reproducible and verifiable from their manifest")
    {
        const fs::path a = fresh_dir("survey-a");
        const fs::path b = fresh_dir("survey-b");
        const auto args = [](const fs::path& d) {
            return small(d, {"--seed", "9", "--waves", "2", "--lag", "4", "survey", "--n", "200"});
        };
        const Result ra = run(args(a));
        const Result rb = run(args(b));
        REQUIRE(ra.code == 0);
        REQUIRE(rb.code == 0);
        CHECK(read_file(a / "summaries.txt") == read_file(b / "summaries.txt"));
        CHECK(ra.out == read_file(a / "summaries.txt"));
        CHECK(ra.out.find("frac_retained_nodes = ") != std::string::npos);

        const fs::path c = fresh_dir("survey-c");
        const Result rerun =
            run({"rerun", "--manifest", (a / "manifest-survey.txt").string(), "--out", c.string(), "--verify"});
        CHECK(rerun.code == 0);
        CHECK(rerun.out.find("1 of 1 outputs byte-identical") != std::string::npos);
        CHECK(read_file(c / "summaries.txt") == read_file(a / "summaries.txt"));

        const Result other = run(small(c, {"--seed", "10", "--waves", "2", "--lag", "4", "survey", "--n", "200"}));
        REQUIRE(other.code == 0);
        CHECK(read_file(c / "summaries.txt") != read_file(a / "summaries.txt"));

        // Tampering with the recorded hash is reported.
        std::string manifest = read_file(a / "manifest-survey.txt");
        const auto pos = manifest.find("hash.summaries.txt = ");
        REQUIRE(pos != std::string::npos);
        manifest[pos + 21] = manifest[pos + 21] == '0' ? '1' : '0';
        write_file_atomic(a / "tampered.txt", manifest);
        const fs::path d = fresh_dir("survey-d");
        CHECK(run({"rerun", "--manifest", (a / "tampered.txt").string(), "--out", d.string(), "--verify"}).code ==
              netabc::cli::kVerifyMismatch);
    }

    TEST_CASE("config files fill unset globals; flags and environment win")
    {
        const fs::path dir = fresh_dir("config");
        write_file_atomic(dir / "run.cfg", "# defaults\nseed = 9\nwaves = 2\nlag = 4\nn_fixed = 150\nm = 40\n"
                                           "tlfb-window = 26\nretention = 26\nburn_in = 80\n");
        const fs::path ref = fresh_dir("config-ref");
        REQUIRE(run(small(ref, {"--seed", "9", "--waves", "2", "--lag", "4", "survey", "--n", "200"})).code == 0);

        const fs::path a = dir / "a";
        REQUIRE(run({"--config", (dir / "run.cfg").string(), "--out", a.string(), "survey", "--n", "200"}).code == 0);
        CHECK(read_file(a / "summaries.txt") == read_file(ref / "summaries.txt"));

        const fs::path b = dir / "b";
        REQUIRE(run({"--config", (dir / "run.cfg").string(), "--seed", "10", "--out", b.string(), "survey", "--n",
                     "200"})
                    .code == 0);
        CHECK(read_file(b / "summaries.txt") != read_file(ref / "summaries.txt"));

        ::setenv("NETABC_SEED", "10", 1);
        const fs::path c = dir / "c";
        const int code = run({"--config", (dir / "run.cfg").string(), "--out", c.string(), "survey", "--n", "200"}).code;
        ::unsetenv("NETABC_SEED");
        REQUIRE(code == 0);
        CHECK(read_file(c / "summaries.txt") == read_file(b / "summaries.txt"));

        write_file_atomic(dir / "bad.cfg", "colour = blue\n");
        CHECK(run({"--config", (dir / "bad.cfg").string(), "--out", dir.string(), "priors", "show"}).code ==
              netabc::cli::kIo);
        CHECK(run({"--config", (dir / "absent.cfg").string(), "--out", dir.string(), "priors", "show"}).code ==
              netabc::cli::kIo);
    }

    TEST_CASE("priors show reports literature coverage")
    {
        const fs::path dir = fresh_dir("priors");
        const Result r = run({"--out", dir.string(), "priors", "show"});
        CHECK(r.code == 0);
        CHECK(r.out.find("mu = 2 1500") != std::string::npos);
        CHECK(r.out.find("10 of 10") != std::string::npos);

        write_file_atomic(dir / "p.txt", "sigma = 50 2\n");
        const Result bad = run({"--out", dir.string(), "--priors", (dir / "p.txt").string(), "priors", "show"});
        CHECK(bad.code == 0);
        CHECK(bad.out.find("# outside: sigma") != std::string::npos);
    }

    TEST_CASE("simulate writes tidy event files")
    {
        const fs::path dir = fresh_dir("simulate");
        const Result r = run(small(dir, {"simulate", "--n", "100", "--steps", "120"}));
        REQUIRE(r.code == 0);
        for (const char* f : {"edges.csv", "casual.csv", "dissolutions.csv", "departures.csv"}) {
            CHECK(fs::exists(dir / f));
        }
        CHECK(read_file(dir / "edges.csv").rfind("u,v,formed_at\n", 0) == 0);
        CHECK(run(small(dir, {"simulate", "--n", "100", "--steps", "10"})).code == netabc::cli::kInvalid);
    }

    TEST_CASE("table, fit, predictive check and quantiles")
    {
        const fs::path dir = fresh_dir("pipeline");
        Result r = run(small(dir, {"--seed", "3", "table", "build", "--rows", "300", "--lags", "0,4", "--chunk", "100"}));
        REQUIRE(r.code == 0);
        CHECK(fs::exists(dir / "table.csv"));
        CHECK(fs::exists(dir / "table.csv.meta"));

        const std::string table = (dir / "table.csv").string();
        write_file_atomic(dir / "obs.txt", "frac_paired = 0.5\nfrac_concurrent = 0.1\nmean_steady_duration = 100\n"
                                           "mean_casual_gap_single = 20\nmean_casual_gap_paired = 40\n");
        r = run(small(dir, {"abc", "fit", "--table", table, "--observed", (dir / "obs.txt").string(), "--accept", "0.1"}));
        REQUIRE(r.code == 0);
        CHECK(r.out.find("accepted 30 of") != std::string::npos);
        for (const char* f : {"posterior.csv", "quantiles.csv", "density.csv", "fit.txt"}) {
            CHECK(fs::exists(dir / f));
        }
        CHECK(read_file(dir / "quantiles.csv").find("parameter,level,probability") != std::string::npos);
        CHECK(read_file(dir / "density.csv").find("prior") != std::string::npos);

        r = run(small(dir, {"abc", "fit", "--table", table, "--observed", (dir / "obs.txt").string(), "--summary-set",
                            "all", "--at-lag", "4"}));
        CHECK(r.code == netabc::cli::kLayout);
        r = run(small(dir, {"abc", "fit", "--table", table, "--observed", (dir / "obs.txt").string(), "--at-lag", "13"}));
        CHECK(r.code == netabc::cli::kInvalid);
        write_file_atomic(dir / "bad-obs.txt", "frac_paired = 1.5\n");
        r = run(small(dir, {"abc", "fit", "--table", table, "--observed", (dir / "bad-obs.txt").string()}));
        CHECK(r.code == netabc::cli::kIo);

        const std::string samples = (dir / "posterior.csv").string();
        r = run(small(dir, {"abc", "ppc", "--samples", samples, "--replicates", "10", "--observed",
                            (dir / "obs.txt").string()}));
        REQUIRE(r.code == 0);
        CHECK(read_file(dir / "ppc.csv").rfind("replicate,summary,value\n", 0) == 0);
        CHECK(read_file(dir / "ppc_check.csv").find("frac_paired,0.5,") != std::string::npos);

        r = run(small(dir, {"abc", "quantiles", "--samples", samples, "--levels", "0.5"}));
        REQUIRE(r.code == 0);
        CHECK(r.out.find("rho") != std::string::npos);

        // Every artifact regenerates byte for byte from its manifest.
        for (const char* m : {"manifest-table-build.txt", "manifest-abc-fit.txt", "manifest-abc-ppc.txt",
                              "manifest-abc-quantiles.txt"}) {
            CAPTURE(m);
            CHECK(run({"rerun", "--manifest", (dir / m).string(), "--verify"}).code == 0);
        }

        // A table with a different generator cannot be resumed.
        r = run(small(dir, {"--seed", "4", "table", "build", "--rows", "300", "--lags", "0,4"}));
        CHECK(r.code == netabc::cli::kLayout);
    }

    TEST_CASE("study rmse on a small table")
    {
        const fs::path dir = fresh_dir("study");
        const Result r = run(small(dir, {"--seed", "5", "study", "rmse", "--rows", "300", "--lags", "0,4", "--test-size",
                                         "4", "--accept", "0.05", "--summary-set", "tlfb,longitudinal"}));
        REQUIRE(r.code == 0);
        const std::string csv = read_file(dir / "rmse.csv");
        CHECK(csv.rfind("lag,summary_set,adjusted,parameter,rmse,se,used,skipped\n", 0) == 0);
        // 2 lags x 2 sets x 2 adjustment modes x 6 parameters.
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 48);
        CHECK(run({"rerun", "--manifest", (dir / "manifest-study-rmse.txt").string(), "--verify"}).code == 0);
    }
}
