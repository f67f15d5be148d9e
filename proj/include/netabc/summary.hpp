#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

namespace netabc {

/// Survey summary statistics in their fixed column order.
enum class Summary : int {
    frac_paired = 0,
    frac_concurrent,
    mean_steady_duration,   // days
    mean_casual_gap_single, // days
    mean_casual_gap_paired, // days
    frac_single_casual_lastweek,
    frac_paired_casual_lastweek,
    frac_retained_nodes,
    frac_retained_edges,
};

inline constexpr int kSummaryCount = 9;
inline constexpr double kDaysPerWeek = 7.0;
inline constexpr double kDaysPerYear = 365.0;

constexpr int index_of(Summary s) { return static_cast<int>(s); }

std::string_view summary_name(Summary s);
std::optional<Summary> summary_from_name(std::string_view name);
/// True for entries measured in days.
bool is_duration(Summary s);

/// Set of summary columns, one bit per Summary.
class SummaryMask {
public:
    constexpr SummaryMask() = default;
    constexpr explicit SummaryMask(std::uint16_t bits)
        : bits_(bits)
    {
    }
    constexpr SummaryMask(std::initializer_list<Summary> list)
    {
        for (const Summary s : list) {
            bits_ = static_cast<std::uint16_t>(bits_ | (1u << index_of(s)));
        }
    }

    constexpr bool contains(Summary s) const { return (bits_ >> index_of(s)) & 1u; }
    constexpr bool contains_all(SummaryMask other) const { return (bits_ & other.bits_) == other.bits_; }
    constexpr void set(Summary s) { bits_ = static_cast<std::uint16_t>(bits_ | (1u << index_of(s))); }
    constexpr std::uint16_t bits() const { return bits_; }
    constexpr int size() const { return __builtin_popcount(bits_); }
    constexpr bool empty() const { return bits_ == 0; }

    friend constexpr SummaryMask operator&(SummaryMask a, SummaryMask b)
    {
        return SummaryMask(static_cast<std::uint16_t>(a.bits_ & b.bits_));
    }
    friend constexpr SummaryMask operator|(SummaryMask a, SummaryMask b)
    {
        return SummaryMask(static_cast<std::uint16_t>(a.bits_ | b.bits_));
    }
    friend constexpr bool operator==(SummaryMask, SummaryMask) = default;

    /// Comma-separated column names.
    std::string to_string() const;

private:
    std::uint16_t bits_ = 0;
};

/// Predefined groups of summaries.
enum class SummarySet { tlfb, longitudinal, all };

/// tlfb: the five timeline follow-back summaries; longitudinal: the six
/// binary-question summaries including retention; all: their union.
SummaryMask summary_mask(SummarySet set);
std::string_view summary_set_name(SummarySet set);
SummarySet summary_set_from_name(std::string_view name);

/// Raw survey output. Absent entries are those the design could not
/// produce (no qualifying respondents, or a single wave).
struct SummaryVector {
    std::array<std::optional<double>, kSummaryCount> values{};
    std::array<std::int64_t, kSummaryCount> counts{}; ///< respondents (or relationships) behind each entry

    std::optional<double>& operator[](Summary s) { return values[static_cast<std::size_t>(index_of(s))]; }
    const std::optional<double>& operator[](Summary s) const
    {
        return values[static_cast<std::size_t>(index_of(s))];
    }
    std::int64_t& count(Summary s) { return counts[static_cast<std::size_t>(index_of(s))]; }
    std::int64_t count(Summary s) const { return counts[static_cast<std::size_t>(index_of(s))]; }

    SummaryMask present() const;
};

/// Summaries on the unit scale (durations divided by days per year) with an
/// explicit presence mask.
struct NormalizedSummaries {
    std::array<double, kSummaryCount> values{};
    SummaryMask present;

    double operator[](Summary s) const { return values[static_cast<std::size_t>(index_of(s))]; }
};

NormalizedSummaries normalize_summaries(const SummaryVector& raw);

/// Observed Stockholm survey summaries (403 respondents).
SummaryVector observed_stockholm();

class KeyValues;
/// `name = value` per present summary followed by `name.count = n` lines.
KeyValues summaries_to_key_values(const SummaryVector& v);
/// Inverse of summaries_to_key_values; counts are optional. Unknown keys
/// are an IoError.
SummaryVector summaries_from_key_values(const KeyValues& kv);

} // namespace netabc
