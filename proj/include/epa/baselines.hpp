#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "epa/attack.hpp"
#include "epa/detection.hpp"
#include "epa/engine.hpp"
#include "epa/error.hpp"
#include "epa/graph.hpp"
#include "epa/metrics.hpp"
#include "epa/operators.hpp"
#include "epa/structure.hpp"

namespace epa {

enum class Method { Epa, AB, AD, AQ, AS, Dw, Dr, Random };

inline std::string method_name(Method m) {
    switch (m) {
    case Method::Epa:
        return "epa";
    case Method::AB:
        return "ab";
    case Method::AD:
        return "ad";
    case Method::AQ:
        return "aq";
    case Method::AS:
        return "as";
    case Method::Dw:
        return "dw";
    case Method::Dr:
        return "dr";
    case Method::Random:
        return "random";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    for (Method m : {Method::Epa, Method::AB, Method::AD, Method::AQ, Method::AS, Method::Dw, Method::Dr, Method::Random})
        if (method_name(m) == s)
            return m;
    throw ConfigError("unknown method '" + s + "'");
}

/// Scale a method runs at; EPA supports all three.
inline std::optional<std::size_t> method_scale_index(Method m) {
    switch (m) {
    case Method::Epa:
        return std::nullopt;
    case Method::Dw:
        return 1;
    case Method::Dr:
        return 2;
    default:
        return 0;
    }
}

namespace detail {

/// Greedy rewiring: each round scores the current graph, deletes the
/// best-scoring original edge still present and adds the farthest original
/// non-edge not yet added. Ties go to the lexicographically smallest pair.
template <typename DeletionScore>
Perturbation greedy_rewiring(const Graph& g, std::size_t budget, DeletionScore score) {
    if (budget < 1)
        throw ConfigError("budget must be at least 1");
    if (budget > g.edge_count())
        throw InfeasibleAttack("budget exceeds the number of links");
    const LinkIndexSpace index(g);
    if (budget > index.nonedge_count())
        throw InfeasibleAttack("budget exceeds the number of non-adjacent pairs");

    const std::size_t n = g.node_count();
    std::vector<NodePair> edges(g.edges().begin(), g.edges().end());
    Perturbation p;
    for (std::size_t round = 0; round < budget; ++round) {
        const Graph current(n, edges);
        const std::vector<double> del_score = score(current);
        const DistanceMatrix dist = all_pairs_distances(current);

        std::optional<std::size_t> del;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            if (!g.has_edge(edges[k].u, edges[k].v))
                continue;
            if (!del || del_score[k] > del_score[*del] + 1e-9 * std::max(1.0, std::abs(del_score[*del])))
                del = k;
        }
        std::optional<NodePair> add;
        std::uint32_t best = 0;
        for (NodeId u = 0; u < n; ++u) {
            for (NodeId v = u + 1; v < n; ++v) {
                if (current.has_edge(u, v) || g.has_edge(u, v))
                    continue;
                if (!add || dist(u, v) > best) {
                    add = NodePair{u, v};
                    best = dist(u, v);
                }
            }
        }
        if (!del || !add)
            throw InfeasibleAttack("graph exhausted before the budget was spent");
        p.deletions.push_back(edges[*del]);
        p.additions.push_back(*add);
        edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(*del));
        edges.push_back(*add);
        std::sort(edges.begin(), edges.end());
    }
    p.normalize();
    return p;
}

} // namespace detail

/// Deletes the highest-betweenness link and adds the longest-distance link,
/// β times, recomputing both on the current graph each round.
inline Perturbation attack_AB(const Graph& g, std::size_t budget) {
    return detail::greedy_rewiring(g, budget, [](const Graph& cur) { return edge_betweenness(cur); });
}

/// As attack_AB with deletion key the degree sum of the link's endpoints.
inline Perturbation attack_AD(const Graph& g, std::size_t budget) {
    return detail::greedy_rewiring(g, budget, [](const Graph& cur) {
        std::vector<double> s(cur.edge_count());
        for (std::size_t k = 0; k < s.size(); ++k) {
            const auto e = cur.edges()[k];
            s[k] = static_cast<double>(cur.degree(e.u) + cur.degree(e.v));
        }
        return s;
    });
}

/// β uniform deletions and β uniform additions over the whole graph.
inline Perturbation random_rewiring(const Graph& g, std::size_t budget, std::uint64_t seed) {
    const LinkIndexSpace index(g);
    if (budget < 1 || budget > index.edge_count() || budget > index.nonedge_count())
        throw InfeasibleAttack("budget outside the admissible range");
    Rng rng(seed);
    std::vector<LinkId> edges(index.edge_count());
    std::vector<LinkId> nonedges(index.nonedge_count());
    for (LinkId i = 0; i < edges.size(); ++i)
        edges[i] = i;
    for (LinkId i = 0; i < nonedges.size(); ++i)
        nonedges[i] = i;
    Chromosome c;
    c.deletions = detail::sample_distinct(edges, budget, rng);
    c.additions = detail::sample_distinct(nonedges, budget, rng);
    return decode(index, c);
}

/// Ψ(d/m) · relative modularity drop of the surrogate detection.
inline double fitness_AQ(const AttackContext& ctx, const Chromosome& c, double q_before) {
    const Graph adv = adversarial_graph(ctx, c);
    const Partition after = louvain(adv, ctx.surrogate_seed);
    const double d = degree_distance(ctx.degrees, adv.degrees());
    const double psi = attenuation(d / static_cast<double>(ctx.graph.edge_count()), ctx.config.attenuation);
    const double drop = std::max(0.0, q_before - modularity(adv, after));
    return psi * (q_before != 0.0 ? drop / std::abs(q_before) : drop);
}

/// Mean deception score over the baseline communities with at least two
/// members, measured against the surrogate detection of the adversarial graph.
inline double fitness_AS(const AttackContext& ctx, const Chromosome& c) {
    const Graph adv = adversarial_graph(ctx, c);
    const Partition after = louvain(adv, ctx.surrogate_seed);
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& members : ctx.baseline.communities()) {
        if (members.size() < 2)
            continue;
        sum += deception_score(members, after, adv);
        ++count;
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

inline AttackReport attack_AQ(const Graph& g, const GAConfig& config) {
    const AttackContext ctx(g, GlobalScale{}, config);
    const double q_before = modularity(ctx.graph, ctx.baseline);
    auto fn = [q_before](const AttackContext& c, const Chromosome& x) { return fitness_AQ(c, x, q_before); };
    return make_report(ctx, "aq", run_ga(ctx, fn));
}

inline AttackReport attack_AS(const Graph& g, const GAConfig& config) {
    const AttackContext ctx(g, GlobalScale{}, config);
    return make_report(ctx, "as", run_ga(ctx, fitness_AS));
}

/// β random deletions inside the target and β random additions from target
/// members to outside nodes.
inline Perturbation attack_Dw(const Graph& g, std::span<const NodeId> target, std::size_t budget, std::uint64_t seed) {
    if (budget < 1)
        throw ConfigError("budget must be at least 1");
    const std::size_t n = g.node_count();
    std::vector<char> inside(n, 0);
    for (NodeId u : target) {
        if (u >= n)
            throw GraphError("target node out of range");
        inside[u] = 1;
    }
    std::vector<NodePair> internal;
    std::vector<NodePair> external;
    for (const auto& e : g.edges())
        if (inside[e.u] && inside[e.v])
            internal.push_back(e);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
            if (inside[u] != inside[v] && !g.has_edge(u, v))
                external.push_back({u, v});
    if (internal.size() < budget || external.size() < budget)
        throw InfeasibleAttack("target community cannot absorb the requested budget");

    Rng rng(seed);
    auto pick = [&](const std::vector<NodePair>& pool) {
        std::vector<LinkId> ids(pool.size());
        for (LinkId i = 0; i < ids.size(); ++i)
            ids[i] = i;
        std::vector<NodePair> out;
        for (LinkId i : detail::sample_distinct(ids, budget, rng))
            out.push_back(pool[i]);
        return out;
    };
    Perturbation p;
    p.deletions = pick(internal);
    p.additions = pick(external);
    p.normalize();
    return p;
}

using DetectorFn = std::function<Partition(const Graph&)>;

/// Adds random links from t to nodes outside its baseline community one at
/// a time, re-running the detector after each, until the node has left its
/// community or the budget is spent.
inline AttackReport attack_Dr(const Graph& g, NodeId t, const DetectorFn& detector, double epsilon,
                              std::size_t max_budget, std::uint64_t seed) {
    if (t >= g.node_count())
        throw InfeasibleAttack("target node " + std::to_string(t) + " does not exist");
    if (g.degree(t) == 0)
        throw InfeasibleAttack("target node " + std::to_string(t) + " is isolated");
    const Partition baseline = detector(g);
    const CommunityId home = baseline.community_of(t);
    std::vector<NodeId> foreign;
    for (NodeId v = 0; v < g.node_count(); ++v)
        if (baseline.community_of(v) != home && !g.has_edge(t, v))
            foreign.push_back(v);
    Rng rng(seed);
    std::shuffle(foreign.begin(), foreign.end(), rng);

    AttackReport r;
    r.method = "dr";
    r.scale = TargetNodeScale{t};
    r.baseline = baseline;
    std::vector<NodePair> edges(g.edges().begin(), g.edges().end());
    Graph current = g;
    Partition after = baseline;
    bool ok = node_attack_succeeded(baseline, after, t, epsilon);
    for (std::size_t k = 0; !ok && k < foreign.size() && k < max_budget; ++k) {
        const NodePair link{std::min(t, foreign[k]), std::max(t, foreign[k])};
        r.perturbation.additions.push_back(link);
        edges.push_back(link);
        current = Graph(g.node_count(), edges);
        after = detector(current);
        ok = node_attack_succeeded(baseline, after, t, epsilon);
    }
    r.perturbation.normalize();
    const LinkIndexSpace index(g);
    for (const auto& p : r.perturbation.additions)
        r.best.additions.push_back(*index.nonedge_index(p));
    r.best.normalize();
    r.adversarial = std::move(current);
    r.detected_after = std::move(after);
    r.budget = r.perturbation.additions.size();
    r.success = ok;
    r.degree_increment_pct = 100.0 * static_cast<double>(r.budget) / static_cast<double>(g.degree(t));
    return r;
}

/// Wraps a fixed perturbation as a report judged by the surrogate detector.
inline AttackReport report_from_perturbation(const Graph& g, std::string method, const AttackScale& scale,
                                             Perturbation p, std::uint64_t seed) {
    AttackReport r;
    r.method = std::move(method);
    r.scale = scale;
    const LinkIndexSpace index(g);
    for (const auto& e : p.additions)
        r.best.additions.push_back(*index.nonedge_index(e));
    for (const auto& e : p.deletions)
        r.best.deletions.push_back(*index.edge_index(e));
    r.best.normalize();
    r.adversarial = apply_perturbation(g, p);
    r.perturbation = std::move(p);
    r.baseline = louvain(g, seed);
    r.detected_after = louvain(r.adversarial, seed);
    r.budget = r.perturbation.additions.size();
    return r;
}

} // namespace epa
