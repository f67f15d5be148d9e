#include "netabc/network.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "netabc/error.hpp"

namespace netabc {

namespace {

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

// Shuffles `pool` in place and drops the last element when the size is odd,
// so consecutive elements form a uniformly random matching.
template <typename T>
void shuffle_for_pairing(std::vector<T>& pool, RandomStream& rng)
{
    for (std::size_t i = pool.size(); i > 1; --i) {
        const std::size_t j = rng.uniform_index(i);
        std::swap(pool[i - 1], pool[j]);
    }
    if (pool.size() % 2 == 1) {
        pool.pop_back();
    }
}

} // namespace

void ModelParams::validate() const
{
    if (!std::isfinite(n) || n <= 0.0) {
        throw InvalidArgument("expected population size n must be positive and finite");
    }
    const std::pair<const char*, double> probs[] = {{"mu", mu},         {"rho", rho},       {"xi", xi},
                                                    {"sigma", sigma},   {"omega0", omega0}, {"omega1", omega1}};
    for (const auto& [name, value] : probs) {
        if (!is_probability(value)) {
            throw InvalidArgument(std::string("parameter ") + name + " must lie in [0, 1]");
        }
    }
}

std::string to_string(DissolutionCause cause)
{
    return cause == DissolutionCause::natural ? "natural" : "migration";
}

// ---------------------------------------------------------------------------
// EventLog

EventLog::EventLog(int retention, Step record_from)
    : retention_(retention)
    , record_from_(record_from)
{
    if (retention < 0) {
        throw InvalidArgument("retention window must be non-negative");
    }
}

void EventLog::record_dissolution(const DissolvedEdge& edge)
{
    if (edge.dissolved_at >= record_from_) {
        dissolved_.push_back(edge);
    }
}

void EventLog::record_departure(const Departure& departure)
{
    if (departure.step >= record_from_) {
        departures_.push_back(departure);
    }
}

void EventLog::record_casual(Step step, std::vector<CasualEdge> edges)
{
    if (retention_ == 0) {
        return;
    }
    casual_.push_back(CasualStep{step, std::move(edges)});
    while (!casual_.empty() && casual_.front().step <= step - retention_) {
        casual_.pop_front();
    }
}

// ---------------------------------------------------------------------------
// NetworkState

NetworkState NetworkState::with_isolated_nodes(std::int64_t count)
{
    NetworkState state;
    state.nodes_.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        state.add_node();
    }
    return state;
}

std::int32_t NetworkState::slot_of(NodeId id) const
{
    const auto it = slot_.find(id);
    if (it == slot_.end()) {
        throw InvalidArgument("unknown node id " + std::to_string(id));
    }
    return it->second;
}

int NetworkState::steady_degree(NodeId id) const
{
    return static_cast<int>(nodes_[static_cast<std::size_t>(slot_of(id))].edges.size());
}

bool NetworkState::adjacent(std::int32_t a, std::int32_t b) const
{
    const auto& na = nodes_[static_cast<std::size_t>(a)];
    const auto& nb = nodes_[static_cast<std::size_t>(b)];
    const auto& scan = na.edges.size() <= nb.edges.size() ? na : nb;
    const std::int32_t self = na.edges.size() <= nb.edges.size() ? a : b;
    const std::int32_t other = self == a ? b : a;
    for (const std::int32_t e : scan.edges) {
        const Edge& edge = edges_[static_cast<std::size_t>(e)];
        if ((edge.a == self ? edge.b : edge.a) == other) {
            return true;
        }
    }
    return false;
}

std::optional<Step> NetworkState::steady_edge_formed_at(NodeId u, NodeId v) const
{
    const auto iu = slot_.find(u);
    const auto iv = slot_.find(v);
    if (iu == slot_.end() || iv == slot_.end()) {
        return std::nullopt;
    }
    for (const std::int32_t e : nodes_[static_cast<std::size_t>(iu->second)].edges) {
        const Edge& edge = edges_[static_cast<std::size_t>(e)];
        if (edge.a == iv->second || edge.b == iv->second) {
            return edge.formed_at;
        }
    }
    return std::nullopt;
}

SteadyEdge NetworkState::to_public(const Edge& e) const
{
    NodeId u = nodes_[static_cast<std::size_t>(e.a)].id;
    NodeId v = nodes_[static_cast<std::size_t>(e.b)].id;
    if (u > v) {
        std::swap(u, v);
    }
    return SteadyEdge{u, v, e.formed_at};
}

std::vector<NodeId> NetworkState::node_ids() const
{
    std::vector<NodeId> ids;
    ids.reserve(nodes_.size());
    for (const auto& node : nodes_) {
        ids.push_back(node.id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<SteadyEdge> NetworkState::steady_edges() const
{
    std::vector<SteadyEdge> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) {
        out.push_back(to_public(e));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<SteadyEdge> NetworkState::steady_edges_of(NodeId id) const
{
    std::vector<SteadyEdge> out;
    for (const std::int32_t e : nodes_[static_cast<std::size_t>(slot_of(id))].edges) {
        out.push_back(to_public(edges_[static_cast<std::size_t>(e)]));
    }
    return out;
}

NodeId NetworkState::add_node()
{
    const NodeId id = next_id_++;
    slot_.emplace(id, static_cast<std::int32_t>(nodes_.size()));
    nodes_.push_back(Node{id, {}});
    return id;
}

void NetworkState::link(std::int32_t a, std::int32_t b, Step formed_at)
{
    const auto index = static_cast<std::int32_t>(edges_.size());
    edges_.push_back(Edge{a, b, formed_at});
    nodes_[static_cast<std::size_t>(a)].edges.push_back(index);
    nodes_[static_cast<std::size_t>(b)].edges.push_back(index);
}

bool NetworkState::add_steady_edge(NodeId u, NodeId v, Step formed_at)
{
    if (u == v) {
        return false;
    }
    const std::int32_t a = slot_of(u);
    const std::int32_t b = slot_of(v);
    if (adjacent(a, b)) {
        return false;
    }
    link(a, b, formed_at);
    return true;
}

void NetworkState::remove_edge(std::int32_t index, Step now, DissolutionCause cause, EventLog& log)
{
    const Edge edge = edges_[static_cast<std::size_t>(index)];
    log.record_dissolution(DissolvedEdge{std::min(nodes_[static_cast<std::size_t>(edge.a)].id,
                                                  nodes_[static_cast<std::size_t>(edge.b)].id),
                                         std::max(nodes_[static_cast<std::size_t>(edge.a)].id,
                                                  nodes_[static_cast<std::size_t>(edge.b)].id),
                                         edge.formed_at, now, cause});

    auto detach = [&](std::int32_t slot) {
        auto& list = nodes_[static_cast<std::size_t>(slot)].edges;
        const auto it = std::find(list.begin(), list.end(), index);
        *it = list.back();
        list.pop_back();
    };
    detach(edge.a);
    detach(edge.b);

    const auto last = static_cast<std::int32_t>(edges_.size() - 1);
    if (index != last) {
        const Edge moved = edges_[static_cast<std::size_t>(last)];
        edges_[static_cast<std::size_t>(index)] = moved;
        for (const std::int32_t slot : {moved.a, moved.b}) {
            auto& list = nodes_[static_cast<std::size_t>(slot)].edges;
            *std::find(list.begin(), list.end(), last) = index;
        }
    }
    edges_.pop_back();
}

void NetworkState::remove_node(std::int32_t slot, Step now, EventLog& log)
{
    while (!nodes_[static_cast<std::size_t>(slot)].edges.empty()) {
        remove_edge(nodes_[static_cast<std::size_t>(slot)].edges.back(), now, DissolutionCause::migration, log);
    }
    const NodeId id = nodes_[static_cast<std::size_t>(slot)].id;
    log.record_departure(Departure{id, now});
    slot_.erase(id);

    const auto last = static_cast<std::int32_t>(nodes_.size() - 1);
    if (slot != last) {
        nodes_[static_cast<std::size_t>(slot)] = std::move(nodes_[static_cast<std::size_t>(last)]);
        Node& moved = nodes_[static_cast<std::size_t>(slot)];
        for (const std::int32_t e : moved.edges) {
            Edge& edge = edges_[static_cast<std::size_t>(e)];
            (edge.a == last ? edge.a : edge.b) = slot;
        }
        slot_[moved.id] = slot;
    }
    nodes_.pop_back();
}

void NetworkState::validate() const
{
    if (nodes_.size() != slot_.size()) {
        throw InvariantViolation("node index out of sync");
    }
    for (std::size_t s = 0; s < nodes_.size(); ++s) {
        const auto it = slot_.find(nodes_[s].id);
        if (it == slot_.end() || it->second != static_cast<std::int32_t>(s)) {
            throw InvariantViolation("node index out of sync");
        }
        if (nodes_[s].id >= next_id_) {
            throw InvariantViolation("node id not below next_node_id");
        }
    }
    std::set<std::pair<NodeId, NodeId>> pairs;
    std::vector<int> degree(nodes_.size(), 0);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge& edge = edges_[e];
        if (edge.a < 0 || edge.b < 0 || static_cast<std::size_t>(edge.a) >= nodes_.size() ||
            static_cast<std::size_t>(edge.b) >= nodes_.size()) {
            throw InvariantViolation("steady edge endpoint is not a node");
        }
        if (edge.a == edge.b) {
            throw InvariantViolation("steady self-loop");
        }
        const SteadyEdge pub = to_public(edge);
        if (!pairs.emplace(pub.u, pub.v).second) {
            throw InvariantViolation("duplicate steady edge");
        }
        if (edge.formed_at > step_) {
            throw InvariantViolation("steady edge formed in the future");
        }
        for (const std::int32_t slot : {edge.a, edge.b}) {
            const auto& list = nodes_[static_cast<std::size_t>(slot)].edges;
            if (std::find(list.begin(), list.end(), static_cast<std::int32_t>(e)) == list.end()) {
                throw InvariantViolation("adjacency out of sync");
            }
        }
        ++degree[static_cast<std::size_t>(edge.a)];
        ++degree[static_cast<std::size_t>(edge.b)];
    }
    for (std::size_t s = 0; s < nodes_.size(); ++s) {
        if (degree[s] != static_cast<int>(nodes_[s].edges.size())) {
            throw InvariantViolation("adjacency out of sync");
        }
    }
    std::set<NodeId> casual_nodes;
    for (const auto& c : casual_) {
        if (c.u == c.v) {
            throw InvariantViolation("casual self-loop");
        }
        if (!contains(c.u) || !contains(c.v)) {
            throw InvariantViolation("casual edge endpoint is not a node");
        }
        if (!casual_nodes.insert(c.u).second || !casual_nodes.insert(c.v).second) {
            throw InvariantViolation("node in more than one casual edge");
        }
    }
}

// ---------------------------------------------------------------------------
// Dynamics

std::vector<std::pair<NodeId, NodeId>> random_pairs(std::span<const NodeId> pool, RandomStream& rng)
{
    std::vector<NodeId> shuffled(pool.begin(), pool.end());
    shuffle_for_pairing(shuffled, rng);
    std::vector<std::pair<NodeId, NodeId>> pairs;
    pairs.reserve(shuffled.size() / 2);
    for (std::size_t i = 0; i + 1 < shuffled.size(); i += 2) {
        pairs.emplace_back(std::min(shuffled[i], shuffled[i + 1]), std::max(shuffled[i], shuffled[i + 1]));
    }
    return pairs;
}

void step(NetworkState& state, const ModelParams& params, RandomStream& rng, EventLog& log, bool casual_phase)
{
    using Slot = std::int32_t;
    const Step now = state.step_ + 1;

    // Phase 1: departures, casual reset, natural dissolution.
    std::vector<Slot> selected;
    for_each_bernoulli(rng, state.nodes_.size(), params.mu,
                       [&](std::uint64_t i) { selected.push_back(static_cast<Slot>(i)); });
    for (auto it = selected.rbegin(); it != selected.rend(); ++it) {
        state.remove_node(*it, now, log);
    }
    state.casual_.clear();

    selected.clear();
    for_each_bernoulli(rng, state.edges_.size(), params.sigma,
                       [&](std::uint64_t i) { selected.push_back(static_cast<Slot>(i)); });
    for (auto it = selected.rbegin(); it != selected.rend(); ++it) {
        state.remove_edge(*it, now, DissolutionCause::natural, log);
    }

    // Phase 2: arrivals.
    const std::uint64_t arrivals = rng.poisson(params.mu * params.n);
    for (std::uint64_t i = 0; i < arrivals; ++i) {
        state.add_node();
    }

    // Phase 3: steady pool. Degrees are read before any new pairing.
    selected.clear();
    std::array<double, 8> damping{};
    for (std::size_t k = 0; k < damping.size(); ++k) {
        damping[k] = std::pow(params.xi, static_cast<double>(k));
    }
    for_each_bernoulli(rng, state.nodes_.size(), params.rho, [&](std::uint64_t i) {
        const std::size_t k = state.nodes_[i].edges.size();
        const double entry = k < damping.size() ? damping[k] : std::pow(params.xi, static_cast<double>(k));
        if (k == 0 || rng.bernoulli(entry)) {
            selected.push_back(static_cast<Slot>(i));
        }
    });
    shuffle_for_pairing(selected, rng);
    for (std::size_t i = 0; i + 1 < selected.size(); i += 2) {
        if (!state.adjacent(selected[i], selected[i + 1])) {
            state.link(selected[i], selected[i + 1], now);
        }
    }

    // Phase 4: casual pool, thinned from the larger of the two probabilities.
    if (casual_phase) {
        const double top = std::max(params.omega0, params.omega1);
        selected.clear();
        for_each_bernoulli(rng, state.nodes_.size(), top, [&](std::uint64_t i) {
            const double p = state.nodes_[i].edges.empty() ? params.omega0 : params.omega1;
            if (p >= top || rng.bernoulli(p / top)) {
                selected.push_back(static_cast<Slot>(i));
            }
        });
        shuffle_for_pairing(selected, rng);
        state.casual_.reserve(selected.size() / 2);
        for (std::size_t i = 0; i + 1 < selected.size(); i += 2) {
            const NodeId a = state.nodes_[static_cast<std::size_t>(selected[i])].id;
            const NodeId b = state.nodes_[static_cast<std::size_t>(selected[i + 1])].id;
            state.casual_.push_back(CasualEdge{std::min(a, b), std::max(a, b)});
        }
        log.record_casual(now, state.casual_);
    }

    state.step_ = now;
}

// ---------------------------------------------------------------------------
// Trajectories

Simulation::Simulation(const ModelParams& params, RandomStream& rng, int retention, Step record_from)
    : params_(params)
    , rng_(&rng)
    , log_(retention, record_from)
{
    params_.validate();
    state_ = NetworkState::with_isolated_nodes(static_cast<std::int64_t>(rng_->poisson(params_.n)));
}

void Simulation::advance_to(Step target, Step casual_from)
{
    while (state_.step() < target) {
        step(state_, params_, *rng_, log_, state_.step() + 1 >= casual_from);
    }
}

SimulationResult simulate(const ModelParams& params, Step total_steps, Step burn_in, std::uint64_t seed,
                          int retention)
{
    if (total_steps < 0 || burn_in < 0 || total_steps < burn_in) {
        throw InvalidArgument("total_steps must be at least burn_in and both non-negative");
    }
    RandomStream rng(seed);
    Simulation sim(params, rng, retention, burn_in + 1);
    sim.advance_to(total_steps, total_steps - retention + 1);
    return SimulationResult{sim.state(), sim.log()};
}

} // namespace netabc
