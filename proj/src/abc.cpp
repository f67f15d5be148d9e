#include "netabc/abc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "netabc/error.hpp"
#include "netabc/kernels.hpp"
#include "netabc/stats.hpp"

namespace netabc {

namespace {

constexpr double kLogitEdge = 1e-9;

double logit(double p)
{
    p = std::clamp(p, kLogitEdge, 1.0 - kLogitEdge);
    return std::log(p / (1.0 - p));
}

double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

Theta theta_of(const ModelParams& params)
{
    Theta t{};
    for (const Param p : kAllParams) {
        t[static_cast<std::size_t>(p)] = get_param(params, p);
    }
    return t;
}

ModelParams params_of(const Theta& theta, double n)
{
    ModelParams params;
    params.n = n;
    for (const Param p : kAllParams) {
        set_param(params, p, theta[static_cast<std::size_t>(p)]);
    }
    return params;
}

SummaryMask matching_summaries(const NormalizedSummaries& observed, SummaryMask selected)
{
    if (!observed.present.contains_all(selected)) {
        throw LayoutMismatch("observed summaries lack " + (selected & SummaryMask(~observed.present.bits())).to_string());
    }
    if (selected.empty()) {
        throw LayoutMismatch("no summaries selected for matching");
    }
    return selected;
}

Posterior abc_reject(const ReferenceTable& table, int view, const NormalizedSummaries& observed,
                     SummaryMask selected, double accept_fraction, bool parallel)
{
    if (!(accept_fraction > 0.0 && accept_fraction <= 1.0)) {
        throw InvalidArgument("accept fraction must lie in (0, 1]");
    }
    if (table.size() == 0) {
        throw EmptyPosterior("reference table is empty");
    }
    if (view < 0 || view >= static_cast<int>(table.views.size())) {
        throw InvalidArgument("table view out of range");
    }
    Posterior post;
    post.used = matching_summaries(observed, selected);
    const TableView& tv = table.views[static_cast<std::size_t>(view)];
    const std::vector<double> dist =
        parallel ? distances_parallel(tv, observed, post.used) : distances_serial(tv, observed, post.used);

    std::vector<std::size_t> order;
    order.reserve(dist.size());
    for (std::size_t r = 0; r < dist.size(); ++r) {
        if (dist[r] != kExcluded) {
            order.push_back(r);
        }
    }
    post.eligible = static_cast<std::int64_t>(order.size());
    post.excluded = static_cast<std::int64_t>(dist.size()) - post.eligible;
    if (order.empty()) {
        throw EmptyPosterior("no table row carries all of " + post.used.to_string());
    }
    const auto keep = std::min<std::size_t>(
        order.size(), static_cast<std::size_t>(std::ceil(accept_fraction * static_cast<double>(order.size()) - 1e-9)));
    const auto closer = [&](std::size_t a, std::size_t b) {
        return dist[a] != dist[b] ? dist[a] < dist[b] : table.seeds[a] < table.seeds[b];
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), closer);
    order.resize(keep);

    post.samples.reserve(keep);
    for (const std::size_t r : order) {
        PosteriorSample s;
        s.row = static_cast<std::int64_t>(r);
        s.seed = table.seeds[r];
        s.theta_raw = table.thetas[r];
        s.distance = dist[r];
        std::copy_n(&tv.values[r * kSummaryCount], kSummaryCount, s.summaries.begin());
        post.samples.push_back(s);
    }
    post.epsilon = post.samples.back().distance;
    return post;
}

void regression_adjust(Posterior& posterior, const NormalizedSummaries& observed, const AdjustOptions& options)
{
    posterior.adjusted = false;
    posterior.adjustment_fallback = false;
    posterior.clamped = 0;
    for (PosteriorSample& s : posterior.samples) {
        s.theta_adjusted.reset();
    }
    std::vector<int> columns;
    for (int j = 0; j < kSummaryCount; ++j) {
        if (posterior.used.contains(static_cast<Summary>(j))) {
            columns.push_back(j);
        }
    }
    const auto n = static_cast<Eigen::Index>(posterior.samples.size());
    const auto p = static_cast<Eigen::Index>(columns.size()) + 1;
    if (n <= p) {
        posterior.adjustment_fallback = true;
        return;
    }

    // Summaries are centred at the observed vector, so the fitted shift is
    // -slope . (t_i - t_obs).
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const PosteriorSample& s = posterior.samples[static_cast<std::size_t>(i)];
        x(i, 0) = 1.0;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const auto key = static_cast<Summary>(columns[c]);
            x(i, static_cast<Eigen::Index>(c) + 1) = s.summaries[static_cast<std::size_t>(columns[c])] - observed[key];
        }
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < p) {
        posterior.adjustment_fallback = true;
        return;
    }

    Eigen::MatrixXd y(n, kParamCount);
    std::array<bool, kParamCount> constant{};
    for (int k = 0; k < kParamCount; ++k) {
        const double first = posterior.samples.front().theta_raw[static_cast<std::size_t>(k)];
        constant[static_cast<std::size_t>(k)] = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double v = posterior.samples[static_cast<std::size_t>(i)].theta_raw[static_cast<std::size_t>(k)];
            constant[static_cast<std::size_t>(k)] = constant[static_cast<std::size_t>(k)] && v == first;
            y(i, k) = options.logit ? logit(v) : v;
        }
    }
    const Eigen::MatrixXd beta = qr.solve(y);
    const Eigen::MatrixXd shift = x.rightCols(p - 1) * beta.bottomRows(p - 1);

    for (Eigen::Index i = 0; i < n; ++i) {
        PosteriorSample& s = posterior.samples[static_cast<std::size_t>(i)];
        Theta adjusted = s.theta_raw;
        for (int k = 0; k < kParamCount; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            if (constant[ku]) {
                continue;
            }
            double v = y(i, k) - shift(i, k);
            if (options.logit) {
                v = expit(v);
            }
            if (v < 0.0 || v > 1.0) {
                v = std::clamp(v, 0.0, 1.0);
                ++posterior.clamped;
            }
            adjusted[ku] = v;
        }
        s.theta_adjusted = adjusted;
    }
    posterior.adjusted = true;
}

std::vector<Theta> posterior_thetas(const Posterior& posterior)
{
    std::vector<Theta> out;
    out.reserve(posterior.samples.size());
    for (const PosteriorSample& s : posterior.samples) {
        out.push_back(s.theta());
    }
    return out;
}

Theta posterior_mean(const Posterior& posterior)
{
    if (posterior.samples.empty()) {
        throw EmptyPosterior("empty posterior");
    }
    Theta m{};
    for (const PosteriorSample& s : posterior.samples) {
        for (std::size_t k = 0; k < kParamCount; ++k) {
            m[k] += s.theta()[k];
        }
    }
    for (double& v : m) {
        v /= static_cast<double>(posterior.samples.size());
    }
    return m;
}

std::vector<QuantileRow> posterior_quantiles(std::span<const Theta> samples, std::span<const double> levels)
{
    if (samples.empty()) {
        throw EmptyPosterior("empty posterior");
    }
    std::vector<QuantileRow> out;
    std::vector<double> column(samples.size());
    for (const Param p : kAllParams) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            column[i] = samples[i][static_cast<std::size_t>(p)];
        }
        const std::vector<double> q = stats::quantiles(column, levels);
        for (std::size_t j = 0; j < levels.size(); ++j) {
            out.push_back({p, levels[j], q[j], to_reporting_scale(p, q[j])});
        }
    }
    return out;
}

std::string samples_to_csv(const Posterior& posterior)
{
    std::string out = "row,seed,distance";
    for (const Param p : kAllParams) {
        out += ",";
        out += param_name(p);
    }
    for (const Param p : kAllParams) {
        out += ",";
        out += param_name(p);
        out += "_adjusted";
    }
    out += "\n";
    for (const PosteriorSample& s : posterior.samples) {
        out += std::to_string(s.row) + "," + std::to_string(s.seed) + "," + format_double(s.distance);
        for (const double v : s.theta_raw) {
            out += "," + format_double(v);
        }
        for (std::size_t k = 0; k < kParamCount; ++k) {
            out += "," + (s.theta_adjusted ? format_double((*s.theta_adjusted)[k]) : std::string("NA"));
        }
        out += "\n";
    }
    return out;
}

std::vector<Theta> samples_from_csv(const std::string& text, const std::string& source)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw EmptyPosterior(source + ": empty posterior");
    }
    std::vector<std::string> header;
    {
        std::istringstream h(line);
        std::string cell;
        while (std::getline(h, cell, ',')) {
            header.push_back(cell);
        }
    }
    std::array<std::ptrdiff_t, kParamCount> raw{};
    std::array<std::ptrdiff_t, kParamCount> adj{};
    for (const Param p : kAllParams) {
        const std::string name(param_name(p));
        const auto find = [&](const std::string& col) {
            const auto it = std::find(header.begin(), header.end(), col);
            return it == header.end() ? std::ptrdiff_t{-1} : it - header.begin();
        };
        raw[static_cast<std::size_t>(p)] = find(name);
        adj[static_cast<std::size_t>(p)] = find(name + "_adjusted");
        if (raw[static_cast<std::size_t>(p)] < 0) {
            throw IoError(source + ": missing column '" + name + "'");
        }
    }
    std::vector<Theta> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() != header.size()) {
            throw IoError(source + ":" + std::to_string(line_no) + ": wrong number of columns");
        }
        Theta t{};
        try {
            for (std::size_t k = 0; k < kParamCount; ++k) {
                const std::ptrdiff_t a = adj[k];
                const bool use_adj = a >= 0 && cells[static_cast<std::size_t>(a)] != "NA";
                t[k] = parse_double(cells[static_cast<std::size_t>(use_adj ? a : raw[k])]);
            }
        } catch (const InvalidArgument& e) {
            throw IoError(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(t);
    }
    if (out.empty()) {
        throw EmptyPosterior(source + ": empty posterior");
    }
    return out;
}

} // namespace netabc
