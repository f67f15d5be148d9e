#include "netabc/survey.hpp"

#include <algorithm>
#include <cmath>

#include "netabc/error.hpp"

namespace netabc {

namespace {

// Dense lookup from node id to cohort position over the cohort's id range.
class CohortIndex {
public:
    explicit CohortIndex(const Cohort& cohort)
    {
        if (cohort.empty()) {
            return;
        }
        offset_ = cohort.front();
        position_.assign(static_cast<std::size_t>(cohort.back() - offset_ + 1), -1);
        for (std::size_t i = 0; i < cohort.size(); ++i) {
            position_[static_cast<std::size_t>(cohort[i] - offset_)] = static_cast<std::int32_t>(i);
        }
    }

    std::int32_t find(NodeId id) const
    {
        const NodeId rel = id - offset_;
        if (rel < 0 || rel >= static_cast<NodeId>(position_.size())) {
            return -1;
        }
        return position_[static_cast<std::size_t>(rel)];
    }

private:
    NodeId offset_ = 0;
    std::vector<std::int32_t> position_;
};

// Count-weighted pooling of summaries across waves.
class WaveAverage {
public:
    void add(const SummaryVector& v)
    {
        for (std::size_t i = 0; i < kSummaryCount; ++i) {
            if (v.values[i] && v.counts[i] > 0) {
                weighted_[i] += *v.values[i] * static_cast<double>(v.counts[i]);
                counts_[i] += v.counts[i];
            }
        }
    }

    SummaryVector result() const
    {
        SummaryVector out;
        for (std::size_t i = 0; i < kSummaryCount; ++i) {
            if (counts_[i] > 0) {
                out.values[i] = weighted_[i] / static_cast<double>(counts_[i]);
                out.counts[i] = counts_[i];
            }
        }
        return out;
    }

private:
    std::array<double, kSummaryCount> weighted_{};
    std::array<std::int64_t, kSummaryCount> counts_{};
};

void set_fraction(SummaryVector& v, Summary s, std::int64_t hits, std::int64_t total)
{
    if (total > 0) {
        v[s] = static_cast<double>(hits) / static_cast<double>(total);
        v.count(s) = total;
    }
}

int casual_window(const SurveyDesign& design) { return std::max(design.tlfb_window, design.casual_recall); }

} // namespace

void SurveyDesign::validate(int retention) const
{
    if (m < 1) {
        throw InvalidArgument("survey needs at least one respondent per wave");
    }
    if (waves < 1) {
        throw InvalidArgument("survey needs at least one wave");
    }
    if (waves > 1 && lag < 1) {
        throw InvalidArgument("lag between waves must be at least one week");
    }
    if (lag < 0) {
        throw InvalidArgument("lag must be non-negative");
    }
    if (tlfb_window < 1 || casual_recall < 1) {
        throw InvalidArgument("recall windows must be at least one week");
    }
    if (tlfb_window > retention || casual_recall > retention) {
        throw InvalidArgument("recall windows exceed the simulator's retention window");
    }
    if (!(dropout >= 0.0 && dropout <= 1.0)) {
        throw InvalidArgument("dropout must lie in [0, 1]");
    }
}

Cohort sample_cohort(const NetworkState& state, int m, RandomStream& rng)
{
    if (m < 0) {
        throw InvalidArgument("cohort size must be non-negative");
    }
    std::vector<NodeId> ids = state.node_ids();
    if (static_cast<std::size_t>(m) > ids.size()) {
        throw InvalidArgument("cohort size " + std::to_string(m) + " exceeds population " +
                              std::to_string(ids.size()));
    }
    for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i) {
        const std::size_t j = i + rng.uniform_index(ids.size() - i);
        std::swap(ids[i], ids[j]);
    }
    ids.resize(static_cast<std::size_t>(m));
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<SteadyEdge> cohort_edges(const NetworkState& state, const Cohort& cohort)
{
    std::vector<SteadyEdge> out;
    for (const NodeId id : cohort) {
        for (const SteadyEdge& e : state.steady_edges_of(id)) {
            const NodeId other = e.u == id ? e.v : e.u;
            if (other < id && std::binary_search(cohort.begin(), cohort.end(), other)) {
                continue; // already listed from the other endpoint
            }
            out.push_back(e);
        }
    }
    return out;
}

SummaryVector cross_sectional_summaries(const NetworkState& state, const EventLog& log, const Cohort& cohort,
                                        const SurveyDesign& design)
{
    SummaryVector out;
    const auto m = static_cast<std::int64_t>(cohort.size());
    if (m == 0) {
        return out;
    }
    const Step now = state.step();
    const Step window = design.tlfb_window;
    const Step window_start = now - window;
    if (log.record_from() > std::max<Step>(1, window_start + 1)) {
        throw InvalidArgument("event log does not cover the recall window");
    }
    const CohortIndex index(cohort);

    std::vector<int> degree(cohort.size());
    std::int64_t paired = 0;
    std::int64_t concurrent = 0;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        degree[i] = state.steady_degree(cohort[i]);
        paired += degree[i] >= 1;
        concurrent += degree[i] >= 2;
    }
    set_fraction(out, Summary::frac_paired, paired, m);
    // Concurrency is reported among respondents with a steady partner.
    set_fraction(out, Summary::frac_concurrent, concurrent, paired);

    // Relationships active at any time in the recall window, with their
    // lifetime [formed, end) on the step axis; ongoing ones end after now.
    struct Spell {
        std::int32_t member;
        Step formed;
        Step end;
    };
    std::vector<Spell> spells;
    double length_sum = 0.0;
    std::int64_t relationships = 0;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        for (const SteadyEdge& e : state.steady_edges_of(cohort[i])) {
            spells.push_back(Spell{static_cast<std::int32_t>(i), e.formed_at, now + 1});
            const NodeId other = e.u == cohort[i] ? e.v : e.u;
            if (other < cohort[i] && index.find(other) >= 0) {
                continue; // counted from the other endpoint
            }
            length_sum += static_cast<double>(std::min<Step>(now - e.formed_at, window));
            ++relationships;
        }
    }
    for (const DissolvedEdge& d : log.dissolved_edges()) {
        if (d.dissolved_at <= window_start || d.dissolved_at > now) {
            continue;
        }
        const std::int32_t pu = index.find(d.u);
        const std::int32_t pv = index.find(d.v);
        if (pu < 0 && pv < 0) {
            continue;
        }
        for (const std::int32_t pos : {pu, pv}) {
            if (pos >= 0) {
                spells.push_back(Spell{pos, d.formed_at, d.dissolved_at});
            }
        }
        length_sum += static_cast<double>(std::min<Step>(d.dissolved_at - d.formed_at, window));
        ++relationships;
    }
    // Durations run from formation and are right-censored at the window.
    if (relationships > 0) {
        out[Summary::mean_steady_duration] = length_sum / static_cast<double>(relationships) * kDaysPerWeek;
        out.count(Summary::mean_steady_duration) = relationships;
    }

    // Steady degree of every respondent at each step of the window, as a
    // respondent-major W-wide table built from difference arrays.
    const auto w = static_cast<std::size_t>(window);
    std::vector<int> degree_at(cohort.size() * (w + 1), 0);
    for (const Spell& sp : spells) {
        const Step lo = std::max(sp.formed, window_start + 1);
        const Step hi = std::min(sp.end, now + 1);
        if (lo >= hi) {
            continue;
        }
        int* row = &degree_at[static_cast<std::size_t>(sp.member) * (w + 1)];
        row[lo - window_start - 1] += 1;
        row[hi - window_start - 1] -= 1;
    }
    double status_weeks[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        int* row = &degree_at[i * (w + 1)];
        int running = 0;
        for (std::size_t k = 0; k < w; ++k) {
            running += row[k];
            row[k] = running;
            status_weeks[running > 0 ? 1 : 0] += 1.0;
        }
    }

    std::int64_t status_contacts[2] = {0, 0};
    std::vector<int> recent(cohort.size(), 0);
    for (const CasualStep& cs : log.casual_history()) {
        if (cs.step > now || (cs.step <= window_start && cs.step <= now - design.casual_recall)) {
            continue;
        }
        const bool in_window = cs.step > window_start;
        const bool in_recall = cs.step > now - design.casual_recall;
        for (const CasualEdge& e : cs.edges) {
            for (const NodeId id : {e.u, e.v}) {
                const std::int32_t pos = index.find(id);
                if (pos < 0) {
                    continue;
                }
                if (in_window) {
                    const int deg = degree_at[static_cast<std::size_t>(pos) * (w + 1) +
                                              static_cast<std::size_t>(cs.step - window_start - 1)];
                    ++status_contacts[deg > 0 ? 1 : 0];
                }
                recent[static_cast<std::size_t>(pos)] += in_recall;
            }
        }
    }

    // Casual gaps: respondent-weeks spent in a status divided by contacts
    // made in that status, pooled over the cohort.
    const Summary gap_keys[2] = {Summary::mean_casual_gap_single, Summary::mean_casual_gap_paired};
    for (int status = 0; status < 2; ++status) {
        if (status_contacts[status] > 0) {
            out[gap_keys[status]] =
                status_weeks[status] * kDaysPerWeek / static_cast<double>(status_contacts[status]);
            out.count(gap_keys[status]) = status_contacts[status];
        }
    }

    // Binary casual question, grouped by status on the survey date.
    std::int64_t recent_hits[2] = {0, 0};
    std::int64_t status_n[2] = {0, 0};
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        const int status = degree[i] >= 1 ? 1 : 0;
        ++status_n[status];
        recent_hits[status] += recent[i] > 0;
    }
    const Summary recent_keys[2] = {Summary::frac_single_casual_lastweek, Summary::frac_paired_casual_lastweek};
    for (int status = 0; status < 2; ++status) {
        set_fraction(out, recent_keys[status], recent_hits[status], status_n[status]);
    }
    return out;
}

LongitudinalResult longitudinal_summaries(const Cohort& cohort, const NetworkState& next_state,
                                          std::span<const SteadyEdge> previous_edges, const SurveyDesign& design,
                                          RandomStream& rng)
{
    LongitudinalResult result;
    if (cohort.empty()) {
        return result;
    }
    Cohort dropped;
    for (const NodeId id : cohort) {
        if (!next_state.contains(id)) {
            continue;
        }
        if (design.dropout > 0.0 && rng.bernoulli(design.dropout)) {
            dropped.push_back(id);
            continue;
        }
        result.next_cohort.push_back(id);
    }
    set_fraction(result.summaries, Summary::frac_retained_nodes,
                 static_cast<std::int64_t>(result.next_cohort.size()), static_cast<std::int64_t>(cohort.size()));
    if (result.next_cohort.empty()) {
        return result;
    }

    // Edges of departed respondents count as lost; edges known only through
    // respondents who dropped out cannot be asked about.
    std::int64_t asked = 0;
    std::int64_t kept = 0;
    for (const SteadyEdge& e : previous_edges) {
        const bool u_in = std::binary_search(cohort.begin(), cohort.end(), e.u);
        const bool v_in = std::binary_search(cohort.begin(), cohort.end(), e.v);
        const bool u_dropped = u_in && std::binary_search(dropped.begin(), dropped.end(), e.u);
        const bool v_dropped = v_in && std::binary_search(dropped.begin(), dropped.end(), e.v);
        if ((!u_in || u_dropped) && (!v_in || v_dropped)) {
            continue;
        }
        ++asked;
        const auto formed = next_state.steady_edge_formed_at(e.u, e.v);
        kept += formed && *formed == e.formed_at;
    }
    set_fraction(result.summaries, Summary::frac_retained_edges, kept, asked);
    return result;
}

SummaryVector run_survey(const ModelParams& params, const SurveyDesign& design, const SimulatorSettings& settings,
                         RandomStream& rng)
{
    design.validate(settings.retention);
    const Step first = settings.burn_in;
    const Step casual_from = first - casual_window(design) + 1;
    Simulation sim(params, rng, settings.retention, first - design.tlfb_window + 1);
    sim.advance_to(first, casual_from);

    WaveAverage pooled;
    Cohort cohort = sample_cohort(sim.state(), design.m, rng);
    pooled.add(cross_sectional_summaries(sim.state(), sim.log(), cohort, design));
    std::vector<SteadyEdge> edges = cohort_edges(sim.state(), cohort);

    for (int wave = 1; wave < design.waves; ++wave) {
        sim.advance_to(first + static_cast<Step>(wave) * design.lag, casual_from);
        LongitudinalResult lon = longitudinal_summaries(cohort, sim.state(), edges, design, rng);
        pooled.add(lon.summaries);
        cohort = std::move(lon.next_cohort);
        if (cohort.empty()) {
            break;
        }
        pooled.add(cross_sectional_summaries(sim.state(), sim.log(), cohort, design));
        edges = cohort_edges(sim.state(), cohort);
    }
    return pooled.result();
}

SummaryVector run_survey(const ModelParams& params, const SurveyDesign& design, const SimulatorSettings& settings,
                         std::uint64_t seed)
{
    RandomStream rng(seed);
    return run_survey(params, design, settings, rng);
}

std::vector<SummaryVector> run_survey_lags(const ModelParams& params, const SurveyDesign& base,
                                           std::span<const int> lags, const SimulatorSettings& settings,
                                           RandomStream& rng)
{
    SurveyDesign design = base;
    design.waves = 1;
    design.validate(settings.retention);
    if (base.dropout != 0.0) {
        throw InvalidArgument("multi-lag surveys require zero dropout");
    }
    if (!std::is_sorted(lags.begin(), lags.end()) || (!lags.empty() && lags.front() < 0)) {
        throw InvalidArgument("lags must be non-negative and sorted ascending");
    }
    const Step first = settings.burn_in;
    const Step casual_from = first - casual_window(design) + 1;
    Simulation sim(params, rng, settings.retention, first - design.tlfb_window + 1);
    sim.advance_to(first, casual_from);

    const Cohort cohort = sample_cohort(sim.state(), design.m, rng);
    const SummaryVector first_wave = cross_sectional_summaries(sim.state(), sim.log(), cohort, design);
    const std::vector<SteadyEdge> edges = cohort_edges(sim.state(), cohort);

    std::vector<SummaryVector> out;
    out.reserve(lags.size());
    for (const int lag : lags) {
        WaveAverage pooled;
        pooled.add(first_wave);
        if (lag > 0) {
            sim.advance_to(first + lag, casual_from);
            LongitudinalResult lon = longitudinal_summaries(cohort, sim.state(), edges, design, rng);
            pooled.add(lon.summaries);
            if (!lon.next_cohort.empty()) {
                pooled.add(cross_sectional_summaries(sim.state(), sim.log(), lon.next_cohort, design));
            }
        }
        out.push_back(pooled.result());
    }
    return out;
}

} // namespace netabc
