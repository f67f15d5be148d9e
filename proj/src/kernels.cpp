#include "netabc/kernels.hpp"

#include <array>
#include <cmath>
#include <omp.h>

namespace netabc {

namespace {

struct Selection {
    std::array<std::size_t, kSummaryCount> columns{};
    std::array<double, kSummaryCount> target{};
    std::size_t size = 0;
    std::uint16_t bits = 0;
};

Selection select(const NormalizedSummaries& observed, SummaryMask selected)
{
    Selection sel;
    sel.bits = selected.bits();
    for (int s = 0; s < kSummaryCount; ++s) {
        const auto key = static_cast<Summary>(s);
        if (selected.contains(key)) {
            sel.columns[sel.size] = static_cast<std::size_t>(s);
            sel.target[sel.size] = observed[key];
            ++sel.size;
        }
    }
    return sel;
}

inline double row_distance(const TableView& view, std::size_t row, const Selection& sel)
{
    if ((view.present[row] & sel.bits) != sel.bits) {
        return kExcluded;
    }
    const double* values = &view.values[row * kSummaryCount];
    double sum = 0.0;
    for (std::size_t j = 0; j < sel.size; ++j) {
        const double d = values[sel.columns[j]] - sel.target[j];
        sum += d * d;
    }
    return std::sqrt(sum);
}

} // namespace

std::vector<double> distances_serial(const TableView& view, const NormalizedSummaries& observed,
                                     SummaryMask selected)
{
    const Selection sel = select(observed, selected);
    std::vector<double> out(view.present.size());
    for (std::size_t r = 0; r < out.size(); ++r) {
        out[r] = row_distance(view, r, sel);
    }
    return out;
}

std::vector<double> distances_parallel(const TableView& view, const NormalizedSummaries& observed,
                                       SummaryMask selected, int workers)
{
    const Selection sel = select(observed, selected);
    const auto rows = static_cast<std::int64_t>(view.present.size());
    std::vector<double> out(static_cast<std::size_t>(rows));
    const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t r = 0; r < rows; ++r) {
        out[static_cast<std::size_t>(r)] = row_distance(view, static_cast<std::size_t>(r), sel);
    }
    return out;
}

} // namespace netabc
