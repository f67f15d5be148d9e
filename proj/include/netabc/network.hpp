#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "netabc/random.hpp"

namespace netabc {

using NodeId = std::int64_t;
using Step = std::int64_t;

/// The seven parameters of the network model. Probabilities are per weekly
/// step.
struct ModelParams {
    double n = 5000.0;    ///< expected population size
    double mu = 0.0;      ///< probability to leave the population
    double rho = 0.0;     ///< probability for a single to seek a steady partner
    double xi = 0.0;      ///< concurrency damping, entry probability rho * xi^k
    double sigma = 0.0;   ///< probability for a steady edge to dissolve
    double omega0 = 0.0;  ///< casual-seek probability when single
    double omega1 = 0.0;  ///< casual-seek probability when partnered

    /// Throws InvalidArgument unless n > 0 and all probabilities lie in [0, 1].
    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct SteadyEdge {
    NodeId u = 0; ///< smaller endpoint
    NodeId v = 0;
    Step formed_at = 0;

    friend bool operator==(const SteadyEdge&, const SteadyEdge&) = default;
    friend auto operator<=>(const SteadyEdge&, const SteadyEdge&) = default;
};

struct CasualEdge {
    NodeId u = 0; ///< smaller endpoint
    NodeId v = 0;

    friend bool operator==(const CasualEdge&, const CasualEdge&) = default;
    friend auto operator<=>(const CasualEdge&, const CasualEdge&) = default;
};

enum class DissolutionCause { natural, migration };

struct DissolvedEdge {
    NodeId u = 0;
    NodeId v = 0;
    Step formed_at = 0;
    Step dissolved_at = 0;
    DissolutionCause cause = DissolutionCause::natural;
};

struct Departure {
    NodeId node = 0;
    Step step = 0;
};

struct CasualStep {
    Step step = 0;
    std::vector<CasualEdge> edges;
};

/// History needed to emulate recall-based survey instruments. Dissolutions
/// and departures are kept from `record_from` onwards; casual contacts are
/// kept for the most recent `retention` steps only.
class EventLog {
public:
    explicit EventLog(int retention = 52, Step record_from = 0);

    int retention() const { return retention_; }
    Step record_from() const { return record_from_; }

    const std::vector<DissolvedEdge>& dissolved_edges() const { return dissolved_; }
    const std::vector<Departure>& departures() const { return departures_; }
    const std::deque<CasualStep>& casual_history() const { return casual_; }

    void record_dissolution(const DissolvedEdge& edge);
    void record_departure(const Departure& departure);
    void record_casual(Step step, std::vector<CasualEdge> edges);

private:
    int retention_;
    Step record_from_;
    std::vector<DissolvedEdge> dissolved_;
    std::vector<Departure> departures_;
    std::deque<CasualStep> casual_;
};

/// Population graph with steady edges (persistent, stamped with their
/// formation step) and the casual edges formed in the current step.
///
/// Nodes live in dense slots that are swap-removed on departure; every edge
/// lives in a dense list referenced by index from both endpoints. Node ids
/// are issued in increasing order and never reused.
class NetworkState {
public:
    NetworkState() = default;

    /// `count` isolated nodes with ids 0 .. count-1 at step 0.
    static NetworkState with_isolated_nodes(std::int64_t count);

    Step step() const { return step_; }
    NodeId next_node_id() const { return next_id_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t steady_edge_count() const { return edges_.size(); }

    bool contains(NodeId id) const { return slot_.contains(id); }
    /// Steady degree of a node; throws InvalidArgument for unknown ids.
    int steady_degree(NodeId id) const;
    /// Formation step of the steady edge joining u and v, if any.
    std::optional<Step> steady_edge_formed_at(NodeId u, NodeId v) const;

    /// Sorted node ids.
    std::vector<NodeId> node_ids() const;
    /// Steady edges sorted by (u, v).
    std::vector<SteadyEdge> steady_edges() const;
    /// Steady edges incident to `id`, in adjacency order.
    std::vector<SteadyEdge> steady_edges_of(NodeId id) const;
    const std::vector<CasualEdge>& casual_edges() const { return casual_; }

    /// Appends a node with a fresh id and returns it.
    NodeId add_node();
    /// Adds a steady edge; returns false when it would be a self-loop or a
    /// duplicate pair.
    bool add_steady_edge(NodeId u, NodeId v, Step formed_at);

    /// Throws InvariantViolation if any structural invariant is broken.
    void validate() const;

    /// Advances the state by one step. See `step()` below.
    friend void step(NetworkState& state, const ModelParams& params, RandomStream& rng, EventLog& log,
                     bool casual_phase);

private:
    struct Node {
        NodeId id = 0;
        std::vector<std::int32_t> edges; // indices into edges_
    };
    struct Edge {
        std::int32_t a = 0; // slots
        std::int32_t b = 0;
        Step formed_at = 0;
    };

    std::int32_t slot_of(NodeId id) const;
    bool adjacent(std::int32_t a, std::int32_t b) const;
    void link(std::int32_t a, std::int32_t b, Step formed_at);
    void remove_edge(std::int32_t index, Step now, DissolutionCause cause, EventLog& log);
    void remove_node(std::int32_t slot, Step now, EventLog& log);
    SteadyEdge to_public(const Edge& e) const;

    Step step_ = 0;
    NodeId next_id_ = 0;
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::unordered_map<NodeId, std::int32_t> slot_;
    std::vector<CasualEdge> casual_;
};

/// Pairs a uniformly shuffled pool; with an odd pool one uniformly chosen
/// member is left out. Pairs are returned with u < v.
std::vector<std::pair<NodeId, NodeId>> random_pairs(std::span<const NodeId> pool, RandomStream& rng);

/// One step of the network model, in four phases:
///  1. nodes leave with probability mu (with all their edges), casual edges
///     are cleared, surviving steady edges dissolve with probability sigma;
///  2. Poisson(mu * n) fresh nodes arrive;
///  3. nodes join the steady pool with probability rho * xi^k, k being the
///     post-dissolution steady degree, and the pool is randomly paired;
///  4. nodes join the casual pool with probability omega0 (single) or
///     omega1 (partnered) and the pool is randomly paired.
///
/// New edges carry the new step index. When `casual_phase` is false phase 4
/// is skipped: casual edges never feed back into the steady dynamics, so
/// steps whose contacts are never observed can omit it.
void step(NetworkState& state, const ModelParams& params, RandomStream& rng, EventLog& log,
          bool casual_phase = true);

/// A trajectory in progress: owns the state and log, draws from a stream
/// owned by the caller.
class Simulation {
public:
    /// Starts from Poisson(n) isolated nodes. Dissolutions and departures are
    /// logged from step `record_from`.
    Simulation(const ModelParams& params, RandomStream& rng, int retention, Step record_from);

    /// Steps until state().step() == target. The casual phase runs for steps
    /// whose new index is at least `casual_from`.
    void advance_to(Step target, Step casual_from);

    const NetworkState& state() const { return state_; }
    const EventLog& log() const { return log_; }
    const ModelParams& params() const { return params_; }
    RandomStream& rng() { return *rng_; }

private:
    ModelParams params_;
    RandomStream* rng_;
    EventLog log_;
    NetworkState state_;
};

struct SimulationResult {
    NetworkState state;
    EventLog log;
};

/// Runs `total_steps` steps from Poisson(n) isolated nodes. Casual history
/// covers the last `retention` steps; dissolutions and departures are logged
/// after `burn_in`.
SimulationResult simulate(const ModelParams& params, Step total_steps, Step burn_in, std::uint64_t seed,
                          int retention = 52);

std::string to_string(DissolutionCause cause);

} // namespace netabc
