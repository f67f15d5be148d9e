#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "netabc/reference_table.hpp"
#include "netabc/summary.hpp"

namespace netabc {

/// Marks rows excluded from a distance pass.
inline constexpr double kExcluded = std::numeric_limits<double>::infinity();

/// Euclidean distance between `observed` and each row of `view` over the
/// summaries in `selected`. Rows lacking any selected summary get
/// kExcluded. The parallel kernel returns the same values bit for bit.
std::vector<double> distances_serial(const TableView& view, const NormalizedSummaries& observed,
                                     SummaryMask selected);
std::vector<double> distances_parallel(const TableView& view, const NormalizedSummaries& observed,
                                       SummaryMask selected, int workers = 0);

} // namespace netabc
