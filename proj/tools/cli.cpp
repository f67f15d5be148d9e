#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <memory>
#include <sstream>

#include "netabc/abc.hpp"
#include "netabc/analytic.hpp"
#include "netabc/error.hpp"
#include "netabc/kvfile.hpp"
#include "netabc/network.hpp"
#include "netabc/priors.hpp"
#include "netabc/reference_table.hpp"
#include "netabc/stats.hpp"
#include "netabc/study.hpp"
#include "netabc/survey.hpp"

namespace fs = std::filesystem;

namespace netabc::cli {

namespace {

constexpr std::string_view kVersion = "1.0.0";
constexpr std::string_view kEnvPrefix = "NETABC_";
constexpr std::string_view kManifestFormat = "netabc-manifest-1";

std::string upper(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    std::replace(s.begin(), s.end(), '-', '_');
    return s;
}

std::string to_text(double v) { return format_double(v); }
std::string to_text(int v) { return std::to_string(v); }
std::string to_text(std::int64_t v) { return std::to_string(v); }
std::string to_text(std::uint64_t v) { return std::to_string(v); }
std::string to_text(const std::string& v) { return v; }

template <typename T>
std::string to_text(const std::vector<T>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? "," : "") + to_text(v[i]);
    }
    return out;
}

// One command-line option with a config key and a canonical spelling for
// manifests.
struct Binding {
    std::string name;
    CLI::App* owner = nullptr;
    CLI::Option* option = nullptr;
    std::function<std::vector<std::string>()> canonical;
    bool recorded = true;
};

class Registry {
public:
    template <typename T>
    CLI::Option* option(CLI::App* app, const std::string& name, T& var, const std::string& help,
                        bool recorded = true)
    {
        CLI::Option* opt = app->add_option("--" + name, var, help)->capture_default_str();
        if constexpr (requires { typename T::value_type; } && !std::is_same_v<T, std::string>) {
            opt->delimiter(',');
        }
        bindings_.push_back({name, app, opt, [name, &var] { return std::vector<std::string>{"--" + name, to_text(var)}; },
                             recorded});
        return opt;
    }

    CLI::Option* flag(CLI::App* app, const std::string& name, bool& var, const std::string& help)
    {
        CLI::Option* opt = app->add_flag("--" + name + ",!--no-" + name, var, help);
        bindings_.push_back({name, app, opt,
                             [name, &var] { return std::vector<std::string>{var ? "--" + name : "--no-" + name}; },
                             true});
        return opt;
    }

    const std::vector<Binding>& bindings() const { return bindings_; }

private:
    std::vector<Binding> bindings_;
};

struct Globals {
    std::string config;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string out = "netabc-out";
    std::string priors;
    double n_fixed = 0.0;
    SurveyDesign design;
    SimulatorSettings settings;
};

struct ParamOptions {
    ModelParams params;

    ParamOptions()
    {
        params.n = 5000.0;
        params.mu = analytic::inverse_odds_to_prob(15.7 * 52.0);
        params.rho = analytic::inverse_odds_to_prob(24.9);
        params.sigma = analytic::inverse_odds_to_prob(42.2);
        params.xi = 0.23;
        params.omega0 = analytic::inverse_odds_to_prob(1.8);
        params.omega1 = analytic::inverse_odds_to_prob(4.5);
    }

    void add(Registry& reg, CLI::App* app)
    {
        reg.option(app, "n", params.n, "Expected population size");
        reg.option(app, "mu", params.mu, "Weekly probability to leave the population");
        reg.option(app, "rho", params.rho, "Weekly probability for singles to seek a steady partner");
        reg.option(app, "xi", params.xi, "Concurrency damping factor");
        reg.option(app, "sigma", params.sigma, "Weekly steady-edge dissolution probability");
        reg.option(app, "omega0", params.omega0, "Weekly casual-seek probability when single");
        reg.option(app, "omega1", params.omega1, "Weekly casual-seek probability when partnered");
    }
};

// Files written by one command, tracked for the manifest.
class Outputs {
public:
    explicit Outputs(fs::path dir)
        : dir_(std::move(dir))
    {
    }

    const fs::path& dir() const { return dir_; }

    void write(const std::string& name, const std::string& contents)
    {
        write_file_atomic(dir_ / name, contents);
        track(name);
    }

    void track(const std::string& name)
    {
        if (std::find(names_.begin(), names_.end(), name) == names_.end()) {
            names_.push_back(name);
        }
    }

    const std::vector<std::string>& names() const { return names_; }

private:
    fs::path dir_;
    std::vector<std::string> names_;
};

std::string hex(std::uint64_t v)
{
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << v;
    return ss.str();
}

std::string file_hash(const fs::path& path) { return hex(fnv1a(read_file(path))); }

PriorConfig load_priors(const Globals& g)
{
    PriorConfig prior = g.priors.empty() ? PriorConfig::defaults() : PriorConfig::from_key_values(KeyValues::load(g.priors));
    if (g.n_fixed > 0.0) {
        prior.n_fixed = g.n_fixed;
    }
    prior.validate();
    return prior;
}

SummaryVector load_observed(const std::string& path)
{
    return summaries_from_key_values(KeyValues::load(path));
}

std::vector<double> parse_levels(const std::vector<double>& levels)
{
    if (levels.empty()) {
        throw InvalidArgument("at least one quantile level is required");
    }
    for (const double q : levels) {
        if (!(q >= 0.0 && q <= 1.0)) {
            throw InvalidArgument("quantile levels must lie in [0, 1]");
        }
    }
    return levels;
}

std::string quantiles_csv(const std::vector<QuantileRow>& rows)
{
    std::string out = "parameter,level,probability,inverse_odds,unit\n";
    for (const QuantileRow& r : rows) {
        out += std::string(param_name(r.param)) + "," + format_double(r.level) + "," + format_double(r.probability) +
               "," + format_double(r.reporting) + "," + std::string(inverse_odds_unit(r.param)) + "\n";
    }
    return out;
}

void print_quantiles(std::ostream& out, const std::vector<QuantileRow>& rows)
{
    out << std::left << std::setw(8) << "param" << std::setw(8) << "level" << std::setw(14) << "probability"
        << "inverse-odds\n";
    for (const QuantileRow& r : rows) {
        std::ostringstream reporting;
        reporting << std::setprecision(4) << r.reporting << " " << inverse_odds_unit(r.param);
        out << std::left << std::setw(8) << param_name(r.param) << std::setw(8) << r.level << std::setw(14)
            << std::setprecision(5) << r.probability << reporting.str() << "\n";
    }
}

std::string densities_csv(const PriorConfig& prior, const std::vector<Theta>& samples)
{
    constexpr int kGrid = 200;
    std::string out = "parameter,distribution,x,density\n";
    std::vector<double> column(samples.size());
    for (const Param p : kAllParams) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            column[i] = samples[i][static_cast<std::size_t>(p)];
        }
        const auto [lo_it, hi_it] = std::minmax_element(column.begin(), column.end());
        const double lo = std::max(0.0, std::min(beta_quantile(0.001, prior[p]), *lo_it));
        double hi = std::min(1.0, std::max(beta_quantile(0.999, prior[p]), *hi_it));
        if (!(hi > lo)) {
            hi = std::min(1.0, lo + 1e-6);
        }
        for (int i = 0; i < kGrid; ++i) {
            const double x = lo + (hi - lo) * i / (kGrid - 1);
            out += std::string(param_name(p)) + ",prior," + format_double(x) + "," +
                   format_double(beta_density(x, prior[p])) + "\n";
        }
        if (column.size() >= 2) {
            for (const auto& pt : stats::gaussian_kde(column, lo, hi, kGrid)) {
                out += std::string(param_name(p)) + ",posterior," + format_double(pt.x) + "," +
                       format_double(pt.density) + "\n";
            }
        }
    }
    return out;
}

class Cli {
public:
    Cli(std::ostream& out, std::ostream& err)
        : out_(out)
        , err_(err)
    {
    }

    int run(const std::vector<std::string>& args);

private:
    void build();
    void apply_config();
    void write_manifest(const std::string& command, const std::vector<std::string>& path);

    int cmd_simulate(Outputs& o);
    int cmd_survey(Outputs& o);
    int cmd_convert(Outputs& o);
    int cmd_table_build(Outputs& o);
    int cmd_abc_fit(Outputs& o);
    int cmd_abc_ppc(Outputs& o);
    int cmd_abc_quantiles(Outputs& o);
    int cmd_study_rmse(Outputs& o);
    int cmd_priors_show(Outputs& o);
    int cmd_rerun();

    std::ostream& out_;
    std::ostream& err_;
    CLI::App app_{"Contact-network simulation and approximate Bayesian inference", "netabc"};
    Registry reg_;
    Globals g_;
    std::vector<std::string> argv_;

    // simulate / survey
    ParamOptions sim_params_;
    ParamOptions survey_params_;
    std::int64_t steps_ = 1560;

    // convert
    double from_daily_ = -1.0;
    double to_daily_ = -1.0;
    double rate_ = -1.0;
    double period_ = 52.0;
    double scale_ = -1.0;
    double inverse_odds_ = -1.0;
    double from_inverse_odds_ = -1.0;
    int decimals_ = 3;

    // table build
    std::int64_t rows_ = 20000;
    std::vector<int> table_lags_;
    std::string table_file_ = "table.csv";
    std::int64_t chunk_ = 1000;

    // abc
    std::string fit_table_;
    std::string observed_ = "data/observed_stockholm.txt";
    double accept_ = 0.01;
    bool adjust_ = true;
    bool logit_ = false;
    std::string fit_set_;
    int fit_lag_ = 0;
    std::vector<double> levels_{0.025, 0.5, 0.975};
    std::string ppc_samples_;
    std::string ppc_observed_;
    int replicates_ = 200;
    std::string q_samples_;
    std::vector<double> q_levels_{0.025, 0.5, 0.975};

    // study
    std::string study_table_;
    std::int64_t study_rows_ = 10000;
    std::vector<int> study_lags_{0, 4, 13, 26, 52};
    std::string study_file_ = "study-table.csv";
    std::vector<std::string> study_sets_{"longitudinal", "tlfb", "all"};
    int test_size_ = 200;
    double study_accept_ = 0.01;
    bool study_adjust_ = true;

    // rerun
    std::string manifest_;
    bool verify_ = false;

    std::map<std::string, std::function<int(Outputs&)>> handlers_;
    std::map<CLI::App*, std::string> names_;
};

void Cli::build()
{
    app_.require_subcommand(1);
    app_.fallthrough();
    app_.set_version_flag("--version", std::string(kVersion));

    CLI::App* a = &app_;
    reg_.option(a, "config", g_.config, "Flat key = value file with defaults for the global options", false)
        ->envname(std::string(kEnvPrefix) + "CONFIG");
    const auto global = [&](auto& var, const std::string& name, const std::string& help, bool recorded = true) {
        reg_.option(a, name, var, help, recorded)->envname(std::string(kEnvPrefix) + upper(name));
    };
    global(g_.seed, "seed", "Master seed");
    global(g_.workers, "workers", "Worker threads (0 uses all cores)", false);
    global(g_.out, "out", "Output directory", false);
    global(g_.priors, "priors", "Prior configuration file");
    global(g_.n_fixed, "n-fixed", "Override the prior's fixed population size (0 keeps it)");
    global(g_.design.m, "m", "Respondents per wave");
    global(g_.design.waves, "waves", "Survey waves");
    global(g_.design.lag, "lag", "Weeks between waves");
    global(g_.design.tlfb_window, "tlfb-window", "Timeline follow-back window, weeks");
    global(g_.design.casual_recall, "casual-recall", "Weeks covered by the binary casual question");
    global(g_.design.dropout, "dropout", "Per-wave dropout probability");
    global(g_.settings.burn_in, "burn-in", "Burn-in steps before the first wave");
    global(g_.settings.retention, "retention", "Weeks of casual history kept by the simulator");

    CLI::App* sim = app_.add_subcommand("simulate", "Simulate a trajectory and dump edges and events");
    sim_params_.add(reg_, sim);
    reg_.option(sim, "steps", steps_, "Total steps");
    names_[sim] = "simulate";

    CLI::App* survey = app_.add_subcommand("survey", "Run one virtual survey and print its summaries");
    survey_params_.add(reg_, survey);
    names_[survey] = "survey";

    CLI::App* convert = app_.add_subcommand("convert", "Convert parameter scales");
    reg_.option(convert, "from-daily", from_daily_, "Fine-scale probability q, rescaled by --scale steps");
    reg_.option(convert, "to-daily", to_daily_, "Coarse-scale probability p, split into --scale steps");
    reg_.option(convert, "rate", rate_, "Expected events x per --period");
    reg_.option(convert, "period", period_, "Period of --rate in simulation time units");
    reg_.option(convert, "scale", scale_, "Steps per coarse step, or time scale kappa for --rate");
    reg_.option(convert, "inverse-odds", inverse_odds_, "Probability p, printed as (1 - p) / p");
    reg_.option(convert, "from-inverse-odds", from_inverse_odds_, "Expected wait w, printed as 1 / (1 + w)");
    reg_.option(convert, "decimals", decimals_, "Decimal places printed");
    names_[convert] = "convert";

    CLI::App* table = app_.add_subcommand("table", "Reference tables");
    table->require_subcommand(1);
    CLI::App* build = table->add_subcommand("build", "Build or resume a reference table");
    reg_.option(build, "rows", rows_, "Rows");
    reg_.option(build, "lags", table_lags_, "Comma-separated lags for a multi-lag table");
    reg_.option(build, "file", table_file_, "Table file name inside the output directory");
    reg_.option(build, "chunk", chunk_, "Rows per appended chunk");
    names_[build] = "table build";

    CLI::App* abc = app_.add_subcommand("abc", "Approximate Bayesian computation");
    abc->require_subcommand(1);
    CLI::App* fit = abc->add_subcommand("fit", "Rejection ABC with optional regression adjustment");
    reg_.option(fit, "table", fit_table_, "Reference table")->required();
    reg_.option(fit, "observed", observed_, "Observed summaries (key = value)");
    reg_.option(fit, "accept", accept_, "Accepted fraction of eligible rows");
    reg_.flag(fit, "adjust", adjust_, "Apply regression adjustment");
    reg_.flag(fit, "logit", logit_, "Adjust on the logit scale");
    reg_.option(fit, "summary-set", fit_set_, "tlfb, longitudinal or all (default: every observed summary)");
    reg_.option(fit, "at-lag", fit_lag_, "Table lag view to match");
    reg_.option(fit, "levels", levels_, "Quantile levels");
    names_[fit] = "abc fit";

    CLI::App* ppc = abc->add_subcommand("ppc", "Posterior predictive replicates");
    reg_.option(ppc, "samples", ppc_samples_, "Posterior samples CSV")->required();
    reg_.option(ppc, "replicates", replicates_, "Replicates");
    reg_.option(ppc, "observed", ppc_observed_, "Observed summaries to check against");
    names_[ppc] = "abc ppc";

    CLI::App* quant = abc->add_subcommand("quantiles", "Posterior quantiles");
    reg_.option(quant, "samples", q_samples_, "Posterior samples CSV")->required();
    reg_.option(quant, "levels", q_levels_, "Quantile levels");
    names_[quant] = "abc quantiles";

    CLI::App* study = app_.add_subcommand("study", "Survey-design studies");
    study->require_subcommand(1);
    CLI::App* rmse = study->add_subcommand("rmse", "RMSE of posterior means against lag and summary set");
    reg_.option(rmse, "table", study_table_, "Existing multi-lag table (otherwise one is built)");
    reg_.option(rmse, "rows", study_rows_, "Rows of the table to build");
    reg_.option(rmse, "lags", study_lags_, "Lags of the table to build");
    reg_.option(rmse, "file", study_file_, "File name of the table to build");
    reg_.option(rmse, "summary-set", study_sets_, "Summary sets (longitudinal, tlfb, all)");
    reg_.option(rmse, "test-size", test_size_, "Test items");
    reg_.option(rmse, "accept", study_accept_, "Accepted fraction");
    reg_.flag(rmse, "adjust", study_adjust_, "Print adjusted (otherwise unadjusted) RMSE");
    names_[rmse] = "study rmse";

    CLI::App* priors = app_.add_subcommand("priors", "Prior configuration");
    priors->require_subcommand(1);
    CLI::App* show = priors->add_subcommand("show", "Print priors and check literature coverage");
    names_[show] = "priors show";

    CLI::App* rerun = app_.add_subcommand("rerun", "Re-run the command recorded in a manifest");
    rerun->add_option("--manifest", manifest_, "Manifest file")->required();
    rerun->add_flag("--verify", verify_, "Compare regenerated outputs with the recorded hashes");
    names_[rerun] = "rerun";

    handlers_["simulate"] = [this](Outputs& o) { return cmd_simulate(o); };
    handlers_["survey"] = [this](Outputs& o) { return cmd_survey(o); };
    handlers_["convert"] = [this](Outputs& o) { return cmd_convert(o); };
    handlers_["table build"] = [this](Outputs& o) { return cmd_table_build(o); };
    handlers_["abc fit"] = [this](Outputs& o) { return cmd_abc_fit(o); };
    handlers_["abc ppc"] = [this](Outputs& o) { return cmd_abc_ppc(o); };
    handlers_["abc quantiles"] = [this](Outputs& o) { return cmd_abc_quantiles(o); };
    handlers_["study rmse"] = [this](Outputs& o) { return cmd_study_rmse(o); };
    handlers_["priors show"] = [this](Outputs& o) { return cmd_priors_show(o); };
}

// Config values fill global options given neither on the command line nor
// through the environment.
void Cli::apply_config()
{
    if (g_.config.empty()) {
        return;
    }
    const KeyValues kv = KeyValues::load(g_.config);
    for (const auto& [key, value] : kv.entries()) {
        const Binding* match = nullptr;
        for (const Binding& b : reg_.bindings()) {
            if (b.owner == &app_ && (b.name == key || upper(b.name) == upper(key)) && b.name != "config") {
                match = &b;
            }
        }
        if (!match) {
            throw IoError(kv.source() + ": unknown configuration key '" + key + "'");
        }
        if (match->option->count() == 0) {
            try {
                match->option->add_result(value);
                match->option->run_callback();
            } catch (const CLI::Error& e) {
                throw IoError(kv.source() + ": bad value for '" + key + "': " + e.what());
            }
        }
    }
}

void Cli::write_manifest(const std::string& command, const std::vector<std::string>& outputs)
{
    KeyValues kv;
    kv.set("format", std::string(kManifestFormat));
    kv.set("version", std::string(kVersion));
    kv.set("command", command);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    kv.set("timestamp", std::string(stamp));
    kv.set("workers", static_cast<std::int64_t>(g_.workers));

    std::vector<std::string> args;
    std::istringstream words(command);
    for (std::string w; words >> w;) {
        args.push_back(w);
    }
    for (const Binding& b : reg_.bindings()) {
        const bool in_chain = b.owner == &app_ || (names_.contains(b.owner) && names_.at(b.owner) == command);
        if (!b.recorded || !in_chain) {
            continue;
        }
        const auto tokens = b.canonical();
        if (tokens.size() == 2 && tokens[1].empty()) {
            continue;
        }
        args.insert(args.end(), tokens.begin(), tokens.end());
    }
    kv.set("args.count", static_cast<std::int64_t>(args.size()));
    for (std::size_t i = 0; i < args.size(); ++i) {
        kv.set("args." + std::to_string(i), args[i]);
    }
    const fs::path dir(g_.out);
    kv.set("outputs.count", static_cast<std::int64_t>(outputs.size()));
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        kv.set("outputs." + std::to_string(i), outputs[i]);
        kv.set("hash." + outputs[i], file_hash(dir / outputs[i]));
    }
    std::string file = "manifest-" + command + ".txt";
    std::replace(file.begin(), file.end(), ' ', '-');
    write_file_atomic(dir / file, kv.to_text());
}

int Cli::run(const std::vector<std::string>& args)
{
    argv_ = args;
    build();
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
        app_.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app_.exit(e, out_, err_);
        return code == 0 ? kOk : kUsage;
    }

    try {
        apply_config();
        std::string command;
        for (const auto& [app, name] : names_) {
            if (app->parsed() && app->get_subcommands().empty()) {
                command = name;
            }
        }
        if (command == "rerun") {
            return cmd_rerun();
        }
        const auto handler = handlers_.find(command);
        if (handler == handlers_.end()) {
            err_ << "netabc: error: no command given\n";
            return kUsage;
        }
        fs::create_directories(g_.out);
        Outputs outputs{fs::path(g_.out)};
        const int code = handler->second(outputs);
        if (code == kOk) {
            write_manifest(command, outputs.names());
        }
        return code;
    } catch (const IoError& e) {
        err_ << "netabc: error: " << e.what() << "\n";
        return kIo;
    } catch (const LayoutMismatch& e) {
        err_ << "netabc: error: layout mismatch: " << e.what() << "\n";
        return kLayout;
    } catch (const EmptyPosterior& e) {
        err_ << "netabc: error: empty posterior: " << e.what() << "\n";
        return kEmptyPosterior;
    } catch (const InvalidArgument& e) {
        err_ << "netabc: error: invalid argument: " << e.what() << "\n";
        return kInvalid;
    } catch (const DomainError& e) {
        err_ << "netabc: error: invalid argument: " << e.what() << "\n";
        return kInvalid;
    } catch (const fs::filesystem_error& e) {
        err_ << "netabc: error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        err_ << "netabc: error: " << e.what() << "\n";
        return kFailure;
    }
}

int Cli::cmd_simulate(Outputs& o)
{
    ModelParams p = sim_params_.params;
    p.validate();
    if (steps_ < g_.settings.burn_in) {
        throw InvalidArgument("--steps must be at least --burn-in");
    }
    const SimulationResult r = simulate(p, steps_, g_.settings.burn_in, g_.seed, g_.settings.retention);

    std::string edges = "u,v,formed_at\n";
    for (const SteadyEdge& e : r.state.steady_edges()) {
        edges += std::to_string(e.u) + "," + std::to_string(e.v) + "," + std::to_string(e.formed_at) + "\n";
    }
    o.write("edges.csv", edges);

    std::string casual = "step,u,v\n";
    for (const CasualStep& cs : r.log.casual_history()) {
        for (const CasualEdge& e : cs.edges) {
            casual += std::to_string(cs.step) + "," + std::to_string(e.u) + "," + std::to_string(e.v) + "\n";
        }
    }
    o.write("casual.csv", casual);

    std::string dissolved = "u,v,formed_at,dissolved_at,cause\n";
    for (const DissolvedEdge& d : r.log.dissolved_edges()) {
        dissolved += std::to_string(d.u) + "," + std::to_string(d.v) + "," + std::to_string(d.formed_at) + "," +
                     std::to_string(d.dissolved_at) + "," + std::string(to_string(d.cause)) + "\n";
    }
    o.write("dissolutions.csv", dissolved);

    std::string departed = "node,step\n";
    for (const Departure& d : r.log.departures()) {
        departed += std::to_string(d.node) + "," + std::to_string(d.step) + "\n";
    }
    o.write("departures.csv", departed);

    out_ << "step " << r.state.step() << ": " << r.state.node_count() << " nodes, " << r.state.steady_edge_count()
         << " steady edges, " << r.log.dissolved_edges().size() << " dissolutions and " << r.log.departures().size()
         << " departures after burn-in\n";
    return kOk;
}

int Cli::cmd_survey(Outputs& o)
{
    ModelParams p = survey_params_.params;
    p.validate();
    const SummaryVector v = run_survey(p, g_.design, g_.settings, g_.seed);
    const std::string text = summaries_to_key_values(v).to_text();
    o.write("summaries.txt", text);
    out_ << text;
    return kOk;
}

int Cli::cmd_convert(Outputs& o)
{
    const int given = (from_daily_ >= 0.0) + (to_daily_ >= 0.0) + (rate_ >= 0.0) + (inverse_odds_ >= 0.0) +
                      (from_inverse_odds_ >= 0.0);
    if (given != 1) {
        throw InvalidArgument(
            "give exactly one of --from-daily, --to-daily, --rate, --inverse-odds, --from-inverse-odds");
    }
    if (decimals_ < 0 || decimals_ > 17) {
        throw InvalidArgument("--decimals must lie in [0, 17]");
    }
    double value = 0.0;
    if (from_daily_ >= 0.0 || to_daily_ >= 0.0) {
        const double k = scale_ > 0.0 ? scale_ : 7.0;
        if (from_daily_ > 1.0 || to_daily_ > 1.0) {
            throw InvalidArgument("probabilities must lie in [0, 1]");
        }
        value = from_daily_ >= 0.0 ? analytic::prob_rescale(from_daily_, k) : analytic::prob_unscale(to_daily_, k);
    } else if (rate_ >= 0.0) {
        if (!(period_ > 0.0)) {
            throw InvalidArgument("--period must be positive");
        }
        value = analytic::rate_to_prob(rate_, period_, scale_ > 0.0 ? scale_ : 1.0);
    } else if (inverse_odds_ >= 0.0) {
        if (inverse_odds_ > 1.0) {
            throw InvalidArgument("probabilities must lie in [0, 1]");
        }
        value = analytic::prob_to_inverse_odds(inverse_odds_);
    } else {
        value = analytic::inverse_odds_to_prob(from_inverse_odds_);
    }
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(decimals_) << value << "\n";
    o.write("convert.txt", ss.str());
    out_ << ss.str();
    return kOk;
}

int Cli::cmd_table_build(Outputs& o)
{
    TableMetadata meta;
    meta.prior = load_priors(g_);
    meta.design = g_.design;
    meta.settings = g_.settings;
    meta.lags = table_lags_;
    std::sort(meta.lags.begin(), meta.lags.end());
    meta.master_seed = g_.seed;
    meta.rows = rows_;
    const fs::path path = o.dir() / table_file_;
    const ReferenceTable t = build_or_resume_table(path, meta, g_.workers, chunk_, [this](std::int64_t done, std::int64_t total) {
        err_ << "table: " << done << "/" << total << " rows\n";
    });
    o.track(table_file_);
    o.track(metadata_path(table_file_).string());
    out_ << "wrote " << t.size() << " rows to " << path.string() << "\n";
    return kOk;
}

int Cli::cmd_abc_fit(Outputs& o)
{
    const ReferenceTable table = load_table(fit_table_);
    const SummaryVector raw = load_observed(observed_);
    const NormalizedSummaries observed = normalize_summaries(raw);
    const SummaryMask selected = fit_set_.empty() ? observed.present : summary_mask(summary_set_from_name(fit_set_));
    const int view = table.meta.view_of_lag(fit_lag_);

    Posterior post = abc_reject(table, view, observed, selected, accept_, g_.workers != 1);
    if (adjust_) {
        regression_adjust(post, observed, AdjustOptions{logit_});
    }
    const std::vector<Theta> thetas = posterior_thetas(post);
    const auto quantiles = posterior_quantiles(thetas, parse_levels(levels_));

    o.write("posterior.csv", samples_to_csv(post));
    o.write("quantiles.csv", quantiles_csv(quantiles));
    o.write("density.csv", densities_csv(table.meta.prior, thetas));
    KeyValues diag;
    diag.set("table", fit_table_);
    diag.set("table_hash", file_hash(fit_table_));
    diag.set("summaries", post.used.to_string());
    diag.set("eligible_rows", post.eligible);
    diag.set("excluded_rows", post.excluded);
    diag.set("accepted", static_cast<std::int64_t>(post.samples.size()));
    diag.set("epsilon", post.epsilon);
    diag.set("adjusted", std::string(post.adjusted ? "true" : "false"));
    diag.set("adjustment_fallback", std::string(post.adjustment_fallback ? "true" : "false"));
    diag.set("clamped", post.clamped);
    o.write("fit.txt", diag.to_text());

    out_ << "accepted " << post.samples.size() << " of " << post.eligible << " eligible rows (epsilon "
         << post.epsilon << ")";
    if (adjust_) {
        out_ << (post.adjustment_fallback ? ", adjustment fell back to raw samples" : ", regression adjusted");
        out_ << ", " << post.clamped << " values clamped";
    }
    out_ << "\n";
    print_quantiles(out_, quantiles);
    return kOk;
}

int Cli::cmd_abc_ppc(Outputs& o)
{
    const std::vector<Theta> samples = samples_from_csv(read_file(ppc_samples_), ppc_samples_);
    const PriorConfig prior = load_priors(g_);
    const auto reps =
        posterior_predictive(samples, prior.n_fixed, g_.design, g_.settings, replicates_, g_.seed, g_.workers);

    std::string tidy = "replicate,summary,value\n";
    for (std::size_t r = 0; r < reps.size(); ++r) {
        for (int s = 0; s < kSummaryCount; ++s) {
            const auto key = static_cast<Summary>(s);
            if (reps[r][key]) {
                tidy += std::to_string(r) + "," + std::string(summary_name(key)) + "," + format_double(*reps[r][key]) +
                        "\n";
            }
        }
    }
    o.write("ppc.csv", tidy);

    if (!ppc_observed_.empty()) {
        const SummaryVector observed = load_observed(ppc_observed_);
        std::string check = "summary,observed,lower,median,upper,inside\n";
        int inside_count = 0;
        int checked = 0;
        for (int s = 0; s < kSummaryCount; ++s) {
            const auto key = static_cast<Summary>(s);
            if (!observed[key]) {
                continue;
            }
            std::vector<double> values;
            for (const SummaryVector& r : reps) {
                if (r[key]) {
                    values.push_back(*r[key]);
                }
            }
            if (values.empty()) {
                continue;
            }
            const double levels[3] = {0.025, 0.5, 0.975};
            const auto q = stats::quantiles(values, levels);
            const bool inside = *observed[key] >= q[0] && *observed[key] <= q[2];
            inside_count += inside;
            ++checked;
            check += std::string(summary_name(key)) + "," + format_double(*observed[key]) + "," + format_double(q[0]) +
                     "," + format_double(q[1]) + "," + format_double(q[2]) + "," + (inside ? "true" : "false") + "\n";
        }
        o.write("ppc_check.csv", check);
        out_ << inside_count << " of " << checked << " observed summaries inside the central 95% of " << reps.size()
             << " replicates\n";
    } else {
        out_ << "wrote " << reps.size() << " replicates\n";
    }
    return kOk;
}

int Cli::cmd_abc_quantiles(Outputs& o)
{
    if (!fs::exists(q_samples_)) {
        throw IoError("cannot open '" + q_samples_ + "'");
    }
    const std::vector<Theta> samples = samples_from_csv(read_file(q_samples_), q_samples_);
    const auto quantiles = posterior_quantiles(samples, parse_levels(q_levels_));
    o.write("quantiles.csv", quantiles_csv(quantiles));
    print_quantiles(out_, quantiles);
    return kOk;
}

int Cli::cmd_study_rmse(Outputs& o)
{
    ReferenceTable table;
    if (!study_table_.empty()) {
        table = load_table(study_table_);
    } else {
        TableMetadata meta;
        meta.prior = load_priors(g_);
        meta.design = g_.design;
        meta.settings = g_.settings;
        meta.lags = study_lags_;
        std::sort(meta.lags.begin(), meta.lags.end());
        meta.master_seed = g_.seed;
        meta.rows = study_rows_;
        table = build_or_resume_table(o.dir() / study_file_, meta, g_.workers, 1000,
                                      [this](std::int64_t done, std::int64_t total) {
                                          err_ << "table: " << done << "/" << total << " rows\n";
                                      });
        o.track(study_file_);
        o.track(metadata_path(study_file_).string());
    }
    StudyOptions options;
    options.sets.clear();
    for (const std::string& name : study_sets_) {
        options.sets.push_back(summary_set_from_name(name));
    }
    options.test_size = test_size_;
    options.accept_fraction = study_accept_;
    const StudyResult result = rmse_study(table, options, g_.workers);

    std::string tidy = "lag,summary_set,adjusted,parameter,rmse,se,used,skipped\n";
    for (const RmseCell& c : result.cells) {
        tidy += std::to_string(c.lag) + "," + std::string(summary_set_name(c.set)) + "," +
                (c.adjusted ? "true" : "false") + "," + std::string(param_name(c.param)) + "," + format_double(c.rmse) +
                "," + format_double(c.se) + "," + std::to_string(c.used) + "," + std::to_string(c.skipped) + "\n";
    }
    o.write("rmse.csv", tidy);

    out_ << (study_adjust_ ? "adjusted" : "unadjusted") << " RMSE of posterior means (" << options.test_size
         << " test items)\n";
    out_ << std::left << std::setw(14) << "set" << std::setw(6) << "lag";
    for (const Param p : kAllParams) {
        out_ << std::setw(18) << param_name(p);
    }
    out_ << "\n";
    for (const SummarySet set : options.sets) {
        for (const int lag : table.meta.lags) {
            out_ << std::setw(14) << summary_set_name(set) << std::setw(6) << lag;
            for (const Param p : kAllParams) {
                const RmseCell& c = result.cell(lag, set, study_adjust_, p);
                std::ostringstream cell;
                cell << std::setprecision(3) << c.rmse << " (" << std::setprecision(2) << c.se << ")";
                out_ << std::setw(18) << cell.str();
            }
            out_ << "\n";
        }
    }
    return kOk;
}

int Cli::cmd_priors_show(Outputs& o)
{
    const PriorConfig prior = load_priors(g_);
    const std::string text = prior.to_key_values().to_text();
    o.write("priors.txt", text);
    out_ << text;
    const auto failures = check_coverage(prior);
    out_ << "# literature values inside the central 98% of their prior: " << literature_values().size() - failures.size()
         << " of " << literature_values().size() << "\n";
    for (const CoverageFailure& f : failures) {
        out_ << "# outside: " << param_name(f.value.param) << " = " << f.value.probability << " (" << f.value.source
             << "), interval [" << f.lower << ", " << f.upper << "]\n";
    }
    return kOk;
}

int Cli::cmd_rerun()
{
    const KeyValues kv = KeyValues::load(manifest_);
    if (kv.require("format") != kManifestFormat) {
        throw IoError(manifest_ + ": not a manifest");
    }
    std::vector<std::string> args{argv_.empty() ? std::string("netabc") : argv_.front()};
    const std::int64_t count = kv.require_int("args.count");
    for (std::int64_t i = 0; i < count; ++i) {
        args.push_back(kv.require("args." + std::to_string(i)));
    }
    const fs::path out_dir = app_.get_option("--out")->count() > 0 ? fs::path(g_.out) : fs::path(manifest_).parent_path();
    args.push_back("--out");
    args.push_back(out_dir.empty() ? "." : out_dir.string());
    args.push_back("--workers");
    args.push_back(std::to_string(g_.workers));

    Cli inner(out_, err_);
    const int code = inner.run(args);
    if (code != kOk || !verify_) {
        return code;
    }
    const std::int64_t outputs = kv.require_int("outputs.count");
    int mismatched = 0;
    for (std::int64_t i = 0; i < outputs; ++i) {
        const std::string name = kv.require("outputs." + std::to_string(i));
        const std::string expected = kv.require("hash." + name);
        const std::string actual = fs::exists(out_dir / name) ? file_hash(out_dir / name) : std::string("missing");
        if (actual != expected) {
            err_ << "netabc: mismatch: " << name << " (expected " << expected << ", got " << actual << ")\n";
            ++mismatched;
        }
    }
    out_ << (outputs - mismatched) << " of " << outputs << " outputs byte-identical\n";
    return mismatched == 0 ? kOk : kVerifyMismatch;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Cli cli(out, err);
    return cli.run(args);
}

} // namespace netabc::cli
