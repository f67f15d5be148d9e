#include "netabc/reference_table.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <omp.h>
#include <sstream>

#include "netabc/error.hpp"

namespace netabc {

namespace {

constexpr std::string_view kFormat = "netabc-table-1";
constexpr std::string_view kMissing = "NA";

std::string join_lags(const std::vector<int>& lags)
{
    std::string out;
    for (std::size_t i = 0; i < lags.size(); ++i) {
        out += (i ? "," : "") + std::to_string(lags[i]);
    }
    return out.empty() ? "none" : out;
}

std::vector<int> split_lags(const std::string& text)
{
    std::vector<int> out;
    if (text == "none" || text.empty()) {
        return out;
    }
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(static_cast<int>(parse_int(item)));
    }
    return out;
}

ReferenceTable empty_table(const TableMetadata& meta, std::int64_t rows)
{
    ReferenceTable t;
    t.meta = meta;
    t.meta.rows = rows;
    const auto n = static_cast<std::size_t>(rows);
    t.seeds.resize(n);
    t.thetas.resize(n);
    t.views.resize(static_cast<std::size_t>(meta.view_count()));
    for (TableView& v : t.views) {
        v.values.assign(n * kSummaryCount, 0.0);
        v.present.assign(n, 0);
    }
    return t;
}

void store_row(ReferenceTable& t, std::size_t slot, const TableRow& row)
{
    t.seeds[slot] = row.seed;
    for (const Param p : kAllParams) {
        t.thetas[slot][static_cast<std::size_t>(p)] = get_param(row.theta, p);
    }
    for (std::size_t v = 0; v < t.views.size(); ++v) {
        const NormalizedSummaries norm = normalize_summaries(row.summaries[v]);
        std::copy(norm.values.begin(), norm.values.end(), t.views[v].values.begin() + static_cast<std::ptrdiff_t>(slot * kSummaryCount));
        t.views[v].present[slot] = norm.present.bits();
    }
}

void check_range(const TableMetadata& meta, std::int64_t begin, std::int64_t end)
{
    meta.validate();
    if (begin < 0 || end < begin) {
        throw InvalidArgument("invalid row range");
    }
}

std::string row_failure(const TableMetadata& meta, std::int64_t row, const std::exception& e)
{
    return "row " + std::to_string(row) + " (seed " + std::to_string(meta.row_seed(row)) + ") failed: " + e.what();
}

} // namespace

std::uint64_t TableMetadata::row_seed(std::int64_t row) const
{
    return derive_seed(master_seed, streams::table, static_cast<std::uint64_t>(row));
}

int TableMetadata::view_of_lag(int lag) const
{
    if (lags.empty()) {
        const int own = design.waves > 1 ? design.lag : 0;
        if (lag == own) {
            return 0;
        }
    }
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (lags[i] == lag) {
            return static_cast<int>(i);
        }
    }
    throw InvalidArgument("table has no view for lag " + std::to_string(lag));
}

void TableMetadata::validate() const
{
    prior.validate();
    design.validate(settings.retention);
    if (settings.burn_in < design.tlfb_window || settings.retention < 1) {
        throw InvalidArgument("burn-in must cover the recall window");
    }
    if (!std::is_sorted(lags.begin(), lags.end()) || std::adjacent_find(lags.begin(), lags.end()) != lags.end() ||
        (!lags.empty() && lags.front() < 0)) {
        throw InvalidArgument("lags must be distinct, non-negative and ascending");
    }
    if (!lags.empty() && (design.waves != 1 || design.dropout != 0.0)) {
        throw InvalidArgument("multi-lag tables need a single-wave base design without dropout");
    }
    if (rows < 0) {
        throw InvalidArgument("row count must be non-negative");
    }
}

KeyValues TableMetadata::to_key_values() const
{
    KeyValues kv;
    kv.set("format", std::string(kFormat));
    kv.set("rows", rows);
    kv.set("master_seed", std::to_string(master_seed));
    kv.set("prior_hash", std::to_string(prior.hash()));
    const KeyValues prior_kv = prior.to_key_values();
    for (const auto& [k, v] : prior_kv.entries()) {
        kv.set("prior." + k, v);
    }
    kv.set("design.m", static_cast<std::int64_t>(design.m));
    kv.set("design.waves", static_cast<std::int64_t>(design.waves));
    kv.set("design.lag", static_cast<std::int64_t>(design.lag));
    kv.set("design.tlfb_window", static_cast<std::int64_t>(design.tlfb_window));
    kv.set("design.casual_recall", static_cast<std::int64_t>(design.casual_recall));
    kv.set("design.dropout", design.dropout);
    kv.set("settings.burn_in", static_cast<std::int64_t>(settings.burn_in));
    kv.set("settings.retention", static_cast<std::int64_t>(settings.retention));
    kv.set("lags", join_lags(lags));
    return kv;
}

TableMetadata TableMetadata::from_key_values(const KeyValues& kv)
{
    if (kv.require("format") != kFormat) {
        throw IoError(kv.source() + ": unsupported table format");
    }
    TableMetadata m;
    KeyValues prior_kv;
    for (const auto& [k, v] : kv.entries()) {
        if (k.starts_with("prior.")) {
            prior_kv.set(k.substr(6), v);
        }
    }
    m.prior = PriorConfig::from_key_values(prior_kv);
    if (std::to_string(m.prior.hash()) != kv.require("prior_hash")) {
        throw IoError(kv.source() + ": prior hash does not match the prior shapes");
    }
    m.rows = kv.require_int("rows");
    m.master_seed = kv.require_uint("master_seed");
    m.design.m = static_cast<int>(kv.require_int("design.m"));
    m.design.waves = static_cast<int>(kv.require_int("design.waves"));
    m.design.lag = static_cast<int>(kv.require_int("design.lag"));
    m.design.tlfb_window = static_cast<int>(kv.require_int("design.tlfb_window"));
    m.design.casual_recall = static_cast<int>(kv.require_int("design.casual_recall"));
    m.design.dropout = kv.require_double("design.dropout");
    m.settings.burn_in = kv.require_int("settings.burn_in");
    m.settings.retention = static_cast<int>(kv.require_int("settings.retention"));
    try {
        m.lags = split_lags(kv.require("lags"));
        m.validate();
    } catch (const InvalidArgument& e) {
        throw IoError(kv.source() + ": " + e.what());
    }
    return m;
}

bool TableMetadata::same_generator(const TableMetadata& other) const
{
    return prior == other.prior && design == other.design && settings == other.settings && lags == other.lags &&
           master_seed == other.master_seed;
}

void ReferenceTable::append(const ReferenceTable& other)
{
    if (!meta.same_generator(other.meta)) {
        throw LayoutMismatch("cannot append rows from a different table generator");
    }
    seeds.insert(seeds.end(), other.seeds.begin(), other.seeds.end());
    thetas.insert(thetas.end(), other.thetas.begin(), other.thetas.end());
    for (std::size_t v = 0; v < views.size(); ++v) {
        views[v].values.insert(views[v].values.end(), other.views[v].values.begin(), other.views[v].values.end());
        views[v].present.insert(views[v].present.end(), other.views[v].present.begin(), other.views[v].present.end());
    }
    meta.rows = static_cast<std::int64_t>(seeds.size());
}

TableRow simulate_row(const TableMetadata& meta, std::int64_t row)
{
    TableRow out;
    out.seed = meta.row_seed(row);
    RandomStream rng(out.seed);
    out.theta = sample_prior(meta.prior, rng);
    if (meta.lags.empty()) {
        out.summaries.push_back(run_survey(out.theta, meta.design, meta.settings, rng));
    } else {
        out.summaries = run_survey_lags(out.theta, meta.design, meta.lags, meta.settings, rng);
    }
    return out;
}

ReferenceTable build_rows_serial(const TableMetadata& meta, std::int64_t begin, std::int64_t end)
{
    check_range(meta, begin, end);
    ReferenceTable t = empty_table(meta, end - begin);
    for (std::int64_t r = begin; r < end; ++r) {
        try {
            store_row(t, static_cast<std::size_t>(r - begin), simulate_row(meta, r));
        } catch (const std::exception& e) {
            throw Error(row_failure(meta, r, e));
        }
    }
    return t;
}

ReferenceTable build_rows_parallel(const TableMetadata& meta, std::int64_t begin, std::int64_t end, int workers)
{
    check_range(meta, begin, end);
    ReferenceTable t = empty_table(meta, end - begin);
    const int threads = workers > 0 ? workers : omp_get_max_threads();
    std::int64_t failed_row = -1;
    std::string failure;
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
    for (std::int64_t r = begin; r < end; ++r) {
        try {
            store_row(t, static_cast<std::size_t>(r - begin), simulate_row(meta, r));
        } catch (const std::exception& e) {
#pragma omp critical(netabc_table_failure)
            if (failed_row < 0 || r < failed_row) {
                failed_row = r;
                failure = row_failure(meta, r, e);
            }
        }
    }
    if (failed_row >= 0) {
        throw Error(failure);
    }
    return t;
}

ReferenceTable build_reference_table(const TableMetadata& meta, int workers)
{
    return build_rows_parallel(meta, 0, meta.rows, workers);
}

std::filesystem::path metadata_path(const std::filesystem::path& table_path)
{
    std::filesystem::path p = table_path;
    p += ".meta";
    return p;
}

std::string table_header(const TableMetadata& meta)
{
    std::string out = "index,seed";
    for (const Param p : kAllParams) {
        out += ",";
        out += param_name(p);
    }
    for (int v = 0; v < meta.view_count(); ++v) {
        for (int s = 0; s < kSummaryCount; ++s) {
            out += ",";
            out += summary_name(static_cast<Summary>(s));
            if (!meta.lags.empty()) {
                out += "@lag" + std::to_string(meta.lags[static_cast<std::size_t>(v)]);
            }
        }
    }
    return out + "\n";
}

std::string table_csv_rows(const ReferenceTable& table, std::int64_t first_index)
{
    std::string out;
    for (std::size_t r = 0; r < table.size(); ++r) {
        out += std::to_string(first_index + static_cast<std::int64_t>(r));
        out += ",";
        out += std::to_string(table.seeds[r]);
        for (const double theta : table.thetas[r]) {
            out += ",";
            out += format_double(theta);
        }
        for (const TableView& view : table.views) {
            const SummaryMask mask = view.mask(r);
            for (int s = 0; s < kSummaryCount; ++s) {
                out += ",";
                const auto key = static_cast<Summary>(s);
                out += mask.contains(key) ? format_double(view.at(r, key)) : std::string(kMissing);
            }
        }
        out += "\n";
    }
    return out;
}

void save_table(const std::filesystem::path& path, const ReferenceTable& table)
{
    write_file_atomic(path, table_header(table.meta) + table_csv_rows(table, 0));
    write_file_atomic(metadata_path(path), table.meta.to_key_values().to_text());
}

ReferenceTable load_table(const std::filesystem::path& path)
{
    const TableMetadata meta = TableMetadata::from_key_values(KeyValues::load(metadata_path(path)));
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line + "\n" != table_header(meta)) {
        throw LayoutMismatch("'" + path.string() + "': header does not match its metadata");
    }
    ReferenceTable t = empty_table(meta, meta.rows);
    const std::size_t columns = 2 + kParamCount + static_cast<std::size_t>(meta.view_count()) * kSummaryCount;
    std::vector<std::string_view> cells;
    for (std::int64_t r = 0; r < meta.rows; ++r) {
        if (!std::getline(in, line)) {
            throw IoError("'" + path.string() + "': expected " + std::to_string(meta.rows) + " rows, found " +
                          std::to_string(r));
        }
        cells.clear();
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        const std::string where = "'" + path.string() + "' row " + std::to_string(r);
        if (cells.size() != columns) {
            throw IoError(where + ": wrong number of columns");
        }
        try {
            if (parse_int(cells[0]) != r) {
                throw IoError(where + ": row index out of sequence");
            }
            const auto slot = static_cast<std::size_t>(r);
            t.seeds[slot] = static_cast<std::uint64_t>(std::stoull(std::string(cells[1])));
            if (t.seeds[slot] != meta.row_seed(r)) {
                throw IoError(where + ": seed does not match the master seed");
            }
            for (std::size_t p = 0; p < kParamCount; ++p) {
                t.thetas[slot][p] = parse_double(cells[2 + p]);
            }
            std::size_t c = 2 + kParamCount;
            for (TableView& view : t.views) {
                SummaryMask mask;
                for (int s = 0; s < kSummaryCount; ++s, ++c) {
                    if (cells[c] != kMissing) {
                        view.values[slot * kSummaryCount + static_cast<std::size_t>(s)] = parse_double(cells[c]);
                        mask.set(static_cast<Summary>(s));
                    }
                }
                view.present[slot] = mask.bits();
            }
        } catch (const InvalidArgument& e) {
            throw IoError(where + ": " + e.what());
        } catch (const std::logic_error& e) {
            throw IoError(where + ": malformed seed");
        }
    }
    return t;
}

ReferenceTable build_or_resume_table(const std::filesystem::path& path, const TableMetadata& meta, int workers,
                                     std::int64_t chunk, const ProgressFn& progress)
{
    meta.validate();
    if (chunk < 1) {
        throw InvalidArgument("chunk size must be positive");
    }
    ReferenceTable table;
    if (std::filesystem::exists(metadata_path(path)) && std::filesystem::exists(path)) {
        table = load_table(path);
        if (!table.meta.same_generator(meta)) {
            throw LayoutMismatch("'" + path.string() + "' was built by a different generator");
        }
        if (table.meta.rows >= meta.rows) {
            ReferenceTable trimmed = empty_table(meta, 0);
            trimmed.seeds.assign(table.seeds.begin(), table.seeds.begin() + meta.rows);
            trimmed.thetas.assign(table.thetas.begin(), table.thetas.begin() + meta.rows);
            for (std::size_t v = 0; v < table.views.size(); ++v) {
                trimmed.views[v].values.assign(table.views[v].values.begin(),
                                               table.views[v].values.begin() + meta.rows * kSummaryCount);
                trimmed.views[v].present.assign(table.views[v].present.begin(),
                                                table.views[v].present.begin() + meta.rows);
            }
            trimmed.meta.rows = meta.rows;
            return trimmed;
        }
        // Drop any rows appended after the last metadata update.
        write_file_atomic(path, table_header(meta) + table_csv_rows(table, 0));
    } else {
        table = empty_table(meta, 0);
        write_file_atomic(path, table_header(meta));
        TableMetadata zero = meta;
        zero.rows = 0;
        write_file_atomic(metadata_path(path), zero.to_key_values().to_text());
    }
    while (table.meta.rows < meta.rows) {
        const std::int64_t begin = table.meta.rows;
        const std::int64_t end = std::min(meta.rows, begin + chunk);
        const ReferenceTable part = build_rows_parallel(meta, begin, end, workers);
        {
            std::ofstream out(path, std::ios::binary | std::ios::app);
            const std::string text = table_csv_rows(part, begin);
            out.write(text.data(), static_cast<std::streamsize>(text.size()));
            if (!out.flush()) {
                throw IoError("cannot append to '" + path.string() + "'");
            }
        }
        table.append(part);
        write_file_atomic(metadata_path(path), table.meta.to_key_values().to_text());
        if (progress) {
            progress(table.meta.rows, meta.rows);
        }
    }
    return table;
}

} // namespace netabc
