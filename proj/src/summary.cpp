#include "netabc/summary.hpp"

#include <cmath>

#include "netabc/error.hpp"
#include "netabc/kvfile.hpp"

namespace netabc {

namespace {

constexpr std::array<std::string_view, kSummaryCount> kNames = {
    "frac_paired",
    "frac_concurrent",
    "mean_steady_duration",
    "mean_casual_gap_single",
    "mean_casual_gap_paired",
    "frac_single_casual_lastweek",
    "frac_paired_casual_lastweek",
    "frac_retained_nodes",
    "frac_retained_edges",
};

} // namespace

std::string_view summary_name(Summary s) { return kNames[static_cast<std::size_t>(index_of(s))]; }

std::optional<Summary> summary_from_name(std::string_view name)
{
    for (int i = 0; i < kSummaryCount; ++i) {
        if (kNames[static_cast<std::size_t>(i)] == name) {
            return static_cast<Summary>(i);
        }
    }
    return std::nullopt;
}

bool is_duration(Summary s)
{
    return s == Summary::mean_steady_duration || s == Summary::mean_casual_gap_single ||
           s == Summary::mean_casual_gap_paired;
}

std::string SummaryMask::to_string() const
{
    std::string out;
    for (int i = 0; i < kSummaryCount; ++i) {
        if (contains(static_cast<Summary>(i))) {
            if (!out.empty()) {
                out += ',';
            }
            out += kNames[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

SummaryMask summary_mask(SummarySet set)
{
    const SummaryMask tlfb{Summary::frac_paired, Summary::frac_concurrent, Summary::mean_steady_duration,
                           Summary::mean_casual_gap_single, Summary::mean_casual_gap_paired};
    const SummaryMask binary{Summary::frac_paired,
                             Summary::frac_concurrent,
                             Summary::frac_single_casual_lastweek,
                             Summary::frac_paired_casual_lastweek,
                             Summary::frac_retained_nodes,
                             Summary::frac_retained_edges};
    switch (set) {
    case SummarySet::tlfb:
        return tlfb;
    case SummarySet::longitudinal:
        return binary;
    case SummarySet::all:
        return tlfb | binary;
    }
    return {};
}

std::string_view summary_set_name(SummarySet set)
{
    switch (set) {
    case SummarySet::tlfb:
        return "tlfb";
    case SummarySet::longitudinal:
        return "longitudinal";
    case SummarySet::all:
        return "all";
    }
    return "";
}

SummarySet summary_set_from_name(std::string_view name)
{
    for (const SummarySet s : {SummarySet::tlfb, SummarySet::longitudinal, SummarySet::all}) {
        if (summary_set_name(s) == name) {
            return s;
        }
    }
    throw InvalidArgument("unknown summary set '" + std::string(name) + "'");
}

SummaryMask SummaryVector::present() const
{
    SummaryMask mask;
    for (int i = 0; i < kSummaryCount; ++i) {
        if (values[static_cast<std::size_t>(i)]) {
            mask.set(static_cast<Summary>(i));
        }
    }
    return mask;
}

NormalizedSummaries normalize_summaries(const SummaryVector& raw)
{
    NormalizedSummaries out;
    for (int i = 0; i < kSummaryCount; ++i) {
        const auto s = static_cast<Summary>(i);
        if (const auto& v = raw[s]) {
            out.values[static_cast<std::size_t>(i)] = is_duration(s) ? *v / kDaysPerYear : *v;
            out.present.set(s);
        }
    }
    return out;
}

SummaryVector observed_stockholm()
{
    SummaryVector v;
    v[Summary::frac_paired] = 0.64;
    v[Summary::frac_concurrent] = 0.146;
    v[Summary::mean_steady_duration] = 203.0;
    v[Summary::mean_casual_gap_single] = 23.1;
    v[Summary::mean_casual_gap_paired] = 36.3;
    for (const Summary s : {Summary::frac_paired, Summary::frac_concurrent, Summary::mean_steady_duration,
                            Summary::mean_casual_gap_single, Summary::mean_casual_gap_paired}) {
        v.count(s) = 403;
    }
    return v;
}

KeyValues summaries_to_key_values(const SummaryVector& v)
{
    KeyValues kv;
    for (int i = 0; i < kSummaryCount; ++i) {
        const auto s = static_cast<Summary>(i);
        if (v[s]) {
            kv.set(std::string(summary_name(s)), *v[s]);
        }
    }
    for (int i = 0; i < kSummaryCount; ++i) {
        const auto s = static_cast<Summary>(i);
        if (v[s]) {
            kv.set(std::string(summary_name(s)) + ".count", v.count(s));
        }
    }
    return kv;
}

SummaryVector summaries_from_key_values(const KeyValues& kv)
{
    SummaryVector v;
    for (const auto& [key, value] : kv.entries()) {
        const bool is_count = key.ends_with(".count");
        const auto s = summary_from_name(is_count ? std::string_view(key).substr(0, key.size() - 6) : key);
        if (!s) {
            throw IoError(kv.source() + ": unknown summary '" + key + "'");
        }
        if (is_count) {
            v.count(*s) = kv.require_int(key);
        } else {
            const double x = kv.require_double(key);
            if (!std::isfinite(x) || x < 0.0 || (!is_duration(*s) && x > 1.0)) {
                throw IoError(kv.source() + ": value out of range for '" + key + "'");
            }
            v[*s] = x;
        }
    }
    return v;
}

} // namespace netabc
