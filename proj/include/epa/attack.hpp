#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "epa/detection.hpp"
#include "epa/error.hpp"
#include "epa/graph.hpp"
#include "epa/partition.hpp"
#include "epa/structure.hpp"

namespace epa {

struct GlobalScale {
    friend bool operator==(const GlobalScale&, const GlobalScale&) = default;
};

/// Hide one community of the baseline (surrogate) detection.
struct TargetCommunityScale {
    CommunityId community = 0;
    friend bool operator==(const TargetCommunityScale&, const TargetCommunityScale&) = default;
};

/// Move one node out of its baseline community.
struct TargetNodeScale {
    NodeId node = 0;
    friend bool operator==(const TargetNodeScale&, const TargetNodeScale&) = default;
};

using AttackScale = std::variant<GlobalScale, TargetCommunityScale, TargetNodeScale>;

inline std::string scale_name(const AttackScale& s) {
    switch (s.index()) {
    case 0:
        return "global";
    case 1:
        return "community";
    default:
        return "node";
    }
}

enum class NodeAttackMode { AddOnly, Rewire };

struct GAConfig {
    std::size_t population = 100;
    std::size_t generations = 200;
    double crossover_rate = 0.6;
    double mutation_rate = 0.1;
    double attenuation = 4.0; // c
    std::size_t max_budget = 1; // θ
    double epsilon = 0.5;
    std::uint64_t seed = 0;
    NodeAttackMode node_mode = NodeAttackMode::AddOnly;
    std::size_t threads = 1; // 0 = hardware concurrency

    void validate() const {
        if (population < 2)
            throw ConfigError("population must be at least 2");
        if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
            throw ConfigError("crossover_rate must lie in [0,1]");
        if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
            throw ConfigError("mutation_rate must lie in [0,1]");
        if (!(attenuation > 0.0))
            throw ConfigError("attenuation factor c must be positive");
        if (max_budget < 1)
            throw ConfigError("max_budget must be at least 1");
        if (!(epsilon >= 0.0 && epsilon <= 1.0))
            throw ConfigError("epsilon must lie in [0,1]");
    }
};

/// One attack candidate: sorted, duplicate-free addition genes (non-edge IDs)
/// and deletion genes (edge IDs). Rewiring chromosomes carry as many
/// deletions as additions; add-only chromosomes carry no deletions.
struct Chromosome {
    std::vector<LinkId> additions;
    std::vector<LinkId> deletions;

    std::size_t budget() const noexcept { return additions.size(); }

    void normalize() {
        std::sort(additions.begin(), additions.end());
        std::sort(deletions.begin(), deletions.end());
    }

    friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

/// Draws an index with probability proportional to its weight.
class WeightedSampler {
public:
    WeightedSampler() = default;
    explicit WeightedSampler(std::span<const double> weights) {
        prefix_.reserve(weights.size());
        double acc = 0.0;
        for (double w : weights) {
            acc += w;
            prefix_.push_back(acc);
        }
    }

    bool empty() const noexcept { return prefix_.empty() || prefix_.back() <= 0.0; }
    std::size_t size() const noexcept { return prefix_.size(); }

    double probability(std::size_t i) const {
        const double prev = i == 0 ? 0.0 : prefix_[i - 1];
        return (prefix_[i] - prev) / prefix_.back();
    }

    template <typename Rng>
    std::size_t operator()(Rng& rng) const {
        std::uniform_real_distribution<double> u(0.0, prefix_.back());
        const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), u(rng));
        return std::min(static_cast<std::size_t>(it - prefix_.begin()), prefix_.size() - 1);
    }

private:
    std::vector<double> prefix_;
};

/// Everything a fitness evaluation or genetic operator reads. Built once per
/// attack and shared read-only across evaluations.
struct AttackContext {
    Graph graph;
    LinkIndexSpace index;
    DegreeSequence degrees;
    Partition baseline;
    AttackScale scale;
    GAConfig config;
    std::uint64_t surrogate_seed = 0;

    // Resolved target data.
    std::vector<NodeId> target_members; // community scale
    std::vector<char> in_target;
    std::size_t target_links = 0; // m_t
    NodeId target_node = 0;       // node scale
    std::size_t target_degree = 0;

    // Admissible genes, sorted.
    std::vector<LinkId> add_pool;
    std::vector<LinkId> del_pool;
    std::size_t max_budget = 0; // θ capped by pool sizes
    bool add_only = false;

    DistanceMatrix distances;
    std::vector<double> betweenness;
    WeightedSampler add_sampler; // over add_pool, ∝ λ
    WeightedSampler del_sampler; // over del_pool, ∝ 1/C_B

    AttackContext(Graph g, AttackScale s, GAConfig cfg, std::optional<Partition> base = std::nullopt)
        : graph(std::move(g)), index(graph), degrees(graph.degrees()), scale(s), config(cfg),
          surrogate_seed(cfg.seed) {
        config.validate();
        if (graph.edge_count() == 0)
            throw InfeasibleAttack("graph has no edges");
        baseline = base ? std::move(*base) : louvain(graph, surrogate_seed);
        if (baseline.node_count() != graph.node_count())
            throw Error("baseline partition does not cover the graph");
        resolve_pools();
        build_samplers();
    }

    bool in_pool(std::span<const LinkId> pool, LinkId id) const { return std::binary_search(pool.begin(), pool.end(), id); }

private:
    void resolve_pools() {
        const std::size_t n = graph.node_count();
        if (std::holds_alternative<GlobalScale>(scale)) {
            add_pool.resize(index.nonedge_count());
            for (LinkId i = 0; i < add_pool.size(); ++i)
                add_pool[i] = i;
            del_pool.resize(index.edge_count());
            for (LinkId i = 0; i < del_pool.size(); ++i)
                del_pool[i] = i;
        } else if (const auto* tc = std::get_if<TargetCommunityScale>(&scale)) {
            if (tc->community >= baseline.community_count())
                throw InfeasibleAttack("target community " + std::to_string(tc->community) + " does not exist");
            target_members = baseline.members(tc->community);
            in_target.assign(n, 0);
            for (NodeId u : target_members)
                in_target[u] = 1;
            for (NodeId u : target_members) {
                for (NodeId v = 0; v < n; ++v) {
                    if (in_target[v])
                        continue;
                    if (auto id = index.nonedge_index({u, v}))
                        add_pool.push_back(*id);
                }
                const auto nb = graph.neighbors(u);
                const auto ids = graph.incident_edges(u);
                for (std::size_t k = 0; k < nb.size(); ++k)
                    if (in_target[nb[k]] && u < nb[k])
                        del_pool.push_back(ids[k]);
            }
            target_links = del_pool.size();
        } else {
            const NodeId t = std::get<TargetNodeScale>(scale).node;
            if (t >= n)
                throw InfeasibleAttack("target node " + std::to_string(t) + " does not exist");
            target_node = t;
            target_degree = graph.degree(t);
            if (target_degree == 0)
                throw InfeasibleAttack("target node " + std::to_string(t) + " is isolated");
            add_only = config.node_mode == NodeAttackMode::AddOnly;
            for (NodeId v = 0; v < n; ++v)
                if (auto id = index.nonedge_index({t, v}))
                    add_pool.push_back(*id);
            if (!add_only) {
                const auto ids = graph.incident_edges(t);
                del_pool.assign(ids.begin(), ids.end());
            }
        }
        std::sort(add_pool.begin(), add_pool.end());
        std::sort(del_pool.begin(), del_pool.end());
        max_budget = std::min<std::size_t>(config.max_budget, add_pool.size());
        if (!add_only)
            max_budget = std::min(max_budget, del_pool.size());
        if (max_budget < 1)
            throw InfeasibleAttack("no admissible rewiring for the requested scale");
    }

    void build_samplers() {
        distances = all_pairs_distances(graph);
        betweenness = edge_betweenness(graph);
        std::vector<double> w;
        w.reserve(add_pool.size());
        if (std::holds_alternative<GlobalScale>(scale)) {
            // Non-edge IDs enumerate non-adjacent pairs in lexicographic order.
            const std::size_t n = graph.node_count();
            for (NodeId u = 0; u < n; ++u)
                for (NodeId v = u + 1; v < n; ++v)
                    if (!graph.has_edge(u, v))
                        w.push_back(distances(u, v));
        } else {
            for (LinkId id : add_pool) {
                const auto p = index.nonedge_pair(id);
                w.push_back(distances(p.u, p.v));
            }
        }
        add_sampler = WeightedSampler(w);
        w.clear();
        for (LinkId id : del_pool)
            w.push_back(1.0 / betweenness[id]);
        del_sampler = WeightedSampler(w);
    }
};

/// Returns a description of the first broken chromosome invariant, if any.
inline std::optional<std::string> chromosome_violation(const AttackContext& ctx, const Chromosome& c) {
    const auto b = c.budget();
    if (b < 1 || b > ctx.max_budget)
        return "budget " + std::to_string(b) + " outside [1," + std::to_string(ctx.max_budget) + "]";
    if (ctx.add_only) {
        if (!c.deletions.empty())
            return std::string("add-only chromosome carries deletions");
    } else if (c.deletions.size() != c.additions.size()) {
        return "unequal gene counts " + std::to_string(c.additions.size()) + "/" + std::to_string(c.deletions.size());
    }
    for (const auto* genes : {&c.additions, &c.deletions}) {
        if (!std::is_sorted(genes->begin(), genes->end()) ||
            std::adjacent_find(genes->begin(), genes->end()) != genes->end())
            return std::string("genes not sorted or duplicated");
    }
    for (LinkId g : c.additions)
        if (!ctx.in_pool(ctx.add_pool, g))
            return "addition gene " + std::to_string(g) + " violates the scale constraints";
    for (LinkId g : c.deletions)
        if (!ctx.in_pool(ctx.del_pool, g))
            return "deletion gene " + std::to_string(g) + " violates the scale constraints";
    return std::nullopt;
}

/// Â as explicit link additions (+1) and deletions (-1).
inline Perturbation decode(const LinkIndexSpace& index, const Chromosome& c) {
    Perturbation p;
    p.additions.reserve(c.additions.size());
    p.deletions.reserve(c.deletions.size());
    for (LinkId g : c.additions)
        p.additions.push_back(index.nonedge_pair(g));
    for (LinkId g : c.deletions)
        p.deletions.push_back(index.edge_pair(g));
    p.normalize();
    return p;
}

inline Graph adversarial_graph(const AttackContext& ctx, const Chromosome& c) {
    return apply_perturbation(ctx.graph, decode(ctx.index, c));
}

} // namespace epa
