#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "netabc/kvfile.hpp"
#include "netabc/priors.hpp"
#include "netabc/survey.hpp"

namespace netabc {

/// Everything needed to regenerate any row of a table.
struct TableMetadata {
    PriorConfig prior = PriorConfig::defaults();
    SurveyDesign design;
    SimulatorSettings settings;
    /// Empty: each row is one run_survey(design). Otherwise each row holds
    /// one summary view per lag from run_survey_lags.
    std::vector<int> lags;
    std::uint64_t master_seed = 0;
    std::int64_t rows = 0;

    int view_count() const { return lags.empty() ? 1 : static_cast<int>(lags.size()); }
    std::uint64_t row_seed(std::int64_t row) const;
    /// View index for `lag`; throws InvalidArgument when absent.
    int view_of_lag(int lag) const;
    void validate() const;

    KeyValues to_key_values() const;
    static TableMetadata from_key_values(const KeyValues& kv);
    /// True when both describe the same row generator (row count ignored).
    bool same_generator(const TableMetadata& other) const;
};

/// Normalized summaries of all rows for one view, row-major.
struct TableView {
    std::vector<double> values;          ///< rows x kSummaryCount
    std::vector<std::uint16_t> present;  ///< SummaryMask bits per row

    double at(std::size_t row, Summary s) const { return values[row * kSummaryCount + static_cast<std::size_t>(index_of(s))]; }
    SummaryMask mask(std::size_t row) const { return SummaryMask(present[row]); }
};

struct ReferenceTable {
    TableMetadata meta;
    std::vector<std::uint64_t> seeds;
    std::vector<std::array<double, kParamCount>> thetas;
    std::vector<TableView> views;

    std::size_t size() const { return seeds.size(); }
    /// Appends rows of `other`, which must share the generator.
    void append(const ReferenceTable& other);
};

struct TableRow {
    std::uint64_t seed = 0;
    ModelParams theta;
    std::vector<SummaryVector> summaries; // one per view
};

/// Regenerates row `row` from the metadata alone.
TableRow simulate_row(const TableMetadata& meta, std::int64_t row);

/// Rows [begin, end) as a table; the returned meta.rows equals end - begin.
/// The OpenMP version gives bit-identical output for any thread count.
ReferenceTable build_rows_serial(const TableMetadata& meta, std::int64_t begin, std::int64_t end);
ReferenceTable build_rows_parallel(const TableMetadata& meta, std::int64_t begin, std::int64_t end, int workers = 0);

/// Builds meta.rows rows in parallel.
ReferenceTable build_reference_table(const TableMetadata& meta, int workers = 0);

using ProgressFn = std::function<void(std::int64_t done, std::int64_t total)>;

/// Builds the table at `path` (CSV plus `path`.meta), resuming from rows
/// already on disk when their metadata matches and appending in chunks.
/// Throws LayoutMismatch when an existing file has a different generator.
ReferenceTable build_or_resume_table(const std::filesystem::path& path, const TableMetadata& meta, int workers = 0,
                                     std::int64_t chunk = 1000, const ProgressFn& progress = {});

std::filesystem::path metadata_path(const std::filesystem::path& table_path);
std::string table_header(const TableMetadata& meta);
std::string table_csv_rows(const ReferenceTable& table, std::int64_t first_index);
void save_table(const std::filesystem::path& path, const ReferenceTable& table);
/// Loads the first meta.rows data rows; extra rows from an interrupted
/// append are ignored.
ReferenceTable load_table(const std::filesystem::path& path);

} // namespace netabc
