#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "epa/error.hpp"
#include "epa/graph.hpp"
#include "epa/partition.hpp"

namespace epa {

/// Modularity Q = sum_c [ l_c/m - (D_c/2m)^2 ].
inline double modularity(const Graph& g, const Partition& p) {
    if (g.edge_count() == 0)
        throw Error("modularity is undefined on a graph without edges");
    if (p.node_count() != g.node_count())
        throw Error("partition does not cover the graph");
    const double m = static_cast<double>(g.edge_count());
    std::vector<double> intra(p.community_count(), 0.0);
    std::vector<double> volume(p.community_count(), 0.0);
    for (const auto& e : g.edges())
        if (p.community_of(e.u) == p.community_of(e.v))
            intra[p.community_of(e.u)] += 1.0;
    for (NodeId u = 0; u < g.node_count(); ++u)
        volume[p.community_of(u)] += static_cast<double>(g.degree(u));
    double q = 0.0;
    for (std::size_t c = 0; c < intra.size(); ++c) {
        const double share = volume[c] / (2.0 * m);
        q += intra[c] / m - share * share;
    }
    return q;
}

namespace detail {

/// Weighted graph with self-loops, used for Louvain's coarsened levels.
/// A self-loop of weight w contributes 2w to its node's strength.
struct WeightedGraph {
    std::size_t n = 0;
    std::vector<std::size_t> offsets;
    std::vector<std::uint32_t> targets;
    std::vector<double> weights;
    std::vector<double> self_loop;
    std::vector<double> strength;
    double total = 0.0; // 2m

    static WeightedGraph from(const Graph& g) {
        WeightedGraph w;
        w.n = g.node_count();
        w.offsets.resize(w.n + 1, 0);
        w.targets.reserve(2 * g.edge_count());
        for (NodeId u = 0; u < w.n; ++u) {
            const auto nb = g.neighbors(u);
            w.targets.insert(w.targets.end(), nb.begin(), nb.end());
            w.offsets[u + 1] = w.targets.size();
        }
        w.weights.assign(w.targets.size(), 1.0);
        w.self_loop.assign(w.n, 0.0);
        w.strength.resize(w.n);
        for (NodeId u = 0; u < w.n; ++u)
            w.strength[u] = static_cast<double>(g.degree(u));
        w.total = 2.0 * static_cast<double>(g.edge_count());
        return w;
    }
};

/// One round of local moves. Returns true if any node changed community.
inline bool louvain_local_moves(const WeightedGraph& g, std::vector<std::uint32_t>& comm, std::mt19937_64& rng) {
    const std::size_t n = g.n;
    comm.resize(n);
    std::iota(comm.begin(), comm.end(), 0u);
    std::vector<double> tot(g.strength);
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<double> link_to(n, -1.0);
    std::vector<std::uint32_t> touched;
    bool any_move = false;
    constexpr double tol = 1e-12;
    for (;;) {
        std::size_t moves = 0;
        for (NodeId i : order) {
            const double k = g.strength[i];
            const std::uint32_t home = comm[i];
            for (std::size_t e = g.offsets[i]; e < g.offsets[i + 1]; ++e) {
                const std::uint32_t c = comm[g.targets[e]];
                if (link_to[c] < 0.0) {
                    link_to[c] = 0.0;
                    touched.push_back(c);
                }
                link_to[c] += g.weights[e];
            }
            tot[home] -= k;
            std::uint32_t best = home;
            double best_gain = std::max(link_to[home], 0.0) - tot[home] * k / g.total;
            for (std::uint32_t c : touched) {
                const double gain = link_to[c] - tot[c] * k / g.total;
                if (gain > best_gain + tol) {
                    best = c;
                    best_gain = gain;
                }
            }
            tot[best] += k;
            comm[i] = best;
            if (best != home)
                ++moves;
            for (std::uint32_t c : touched)
                link_to[c] = -1.0;
            touched.clear();
        }
        if (moves == 0)
            break;
        any_move = true;
    }
    return any_move;
}

/// Collapses communities into nodes; `comm` is relabelled densely in place.
inline WeightedGraph louvain_aggregate(const WeightedGraph& g, std::vector<std::uint32_t>& comm) {
    std::vector<std::uint32_t> dense(g.n, static_cast<std::uint32_t>(-1));
    std::uint32_t k = 0;
    for (auto& c : comm) {
        if (dense[c] == static_cast<std::uint32_t>(-1))
            dense[c] = k++;
        c = dense[c];
    }
    std::vector<std::vector<NodeId>> members(k);
    for (NodeId u = 0; u < g.n; ++u)
        members[comm[u]].push_back(u);

    WeightedGraph out;
    out.n = k;
    out.offsets.assign(k + 1, 0);
    out.self_loop.assign(k, 0.0);
    out.strength.assign(k, 0.0);
    out.total = g.total;
    std::vector<double> acc(k, 0.0);
    std::vector<std::uint32_t> touched;
    for (std::uint32_t c = 0; c < k; ++c) {
        for (NodeId u : members[c]) {
            out.self_loop[c] += g.self_loop[u];
            out.strength[c] += g.strength[u];
            for (std::size_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
                const std::uint32_t d = comm[g.targets[e]];
                if (d == c) {
                    out.self_loop[c] += g.weights[e] / 2.0;
                } else {
                    if (acc[d] == 0.0)
                        touched.push_back(d);
                    acc[d] += g.weights[e];
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        for (std::uint32_t d : touched) {
            out.targets.push_back(d);
            out.weights.push_back(acc[d]);
            acc[d] = 0.0;
        }
        touched.clear();
        out.offsets[c + 1] = out.targets.size();
    }
    return out;
}

} // namespace detail

/// Louvain modularity ascent: seeded node sweeps with local moves, then
/// community aggregation, repeated until a level moves nothing. Returns the
/// coarsest level. Equal-gain moves keep the node where it is.
inline Partition louvain(const Graph& g, std::uint64_t seed) {
    const std::size_t n = g.node_count();
    std::vector<std::uint32_t> node_comm(n);
    std::iota(node_comm.begin(), node_comm.end(), 0u);
    if (g.edge_count() == 0)
        return Partition::singletons(n);

    std::mt19937_64 rng(seed);
    detail::WeightedGraph level = detail::WeightedGraph::from(g);
    std::vector<std::uint32_t> comm;
    while (detail::louvain_local_moves(level, comm, rng)) {
        level = detail::louvain_aggregate(level, comm);
        for (auto& c : node_comm)
            c = comm[c];
    }
    return Partition::from_labels(node_comm);
}

/// CNM agglomeration: start from singletons and repeatedly merge the adjacent
/// pair with the largest modularity gain, smallest ID pair first on ties,
/// until no merge increases Q. The stopping point is the Q peak.
inline Partition greedy_modularity(const Graph& g) {
    const std::size_t n = g.node_count();
    if (g.edge_count() == 0)
        return Partition::singletons(n);
    const double two_m = 2.0 * static_cast<double>(g.edge_count());

    std::vector<std::map<std::uint32_t, double>> e(n);
    std::vector<double> a(n);
    for (NodeId u = 0; u < n; ++u) {
        a[u] = static_cast<double>(g.degree(u)) / two_m;
        for (NodeId v : g.neighbors(u))
            e[u][v] = 1.0 / two_m;
    }
    std::vector<std::uint32_t> label(n);
    std::iota(label.begin(), label.end(), 0u);
    std::vector<char> alive(n, 1);

    constexpr double tol = 1e-12;
    for (;;) {
        double best = tol;
        std::uint32_t bi = 0;
        std::uint32_t bj = 0;
        bool found = false;
        for (std::uint32_t i = 0; i < n; ++i) {
            if (!alive[i])
                continue;
            for (auto it = e[i].upper_bound(i); it != e[i].end(); ++it) {
                const double dq = 2.0 * (it->second - a[i] * a[it->first]);
                if (dq > best + (found ? tol : 0.0)) {
                    best = dq;
                    bi = i;
                    bj = it->first;
                    found = true;
                }
            }
        }
        if (!found)
            break;
        for (const auto& [k, w] : e[bj]) {
            if (k == bi)
                continue;
            e[bi][k] += w;
            e[k][bi] += w;
            e[k].erase(bj);
        }
        e[bi].erase(bj);
        e[bj].clear();
        a[bi] += a[bj];
        a[bj] = 0.0;
        alive[bj] = 0;
        for (auto& l : label)
            if (l == bj)
                l = bi;
    }
    return Partition::from_labels(label);
}

/// Asynchronous label propagation in seeded random order. A node keeps its
/// label when that label is already among its most frequent neighbor labels;
/// otherwise it adopts one of the most frequent labels uniformly at random.
/// Stops after a sweep with no label change, or after `max_sweeps` sweeps.
inline Partition label_propagation(const Graph& g, std::uint64_t seed, int max_sweeps = 100) {
    const std::size_t n = g.node_count();
    std::vector<std::uint32_t> label(n);
    std::iota(label.begin(), label.end(), 0u);
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::mt19937_64 rng(seed);

    std::vector<std::uint32_t> count(n, 0);
    std::vector<std::uint32_t> seen;
    std::vector<std::uint32_t> ties;
    // Fills `ties` with the most frequent neighbor labels of u, sorted.
    const auto top_labels = [&](NodeId u) {
        for (NodeId w : g.neighbors(u)) {
            if (count[label[w]]++ == 0)
                seen.push_back(label[w]);
        }
        std::uint32_t best = 0;
        ties.clear();
        for (std::uint32_t l : seen) {
            if (count[l] > best) {
                best = count[l];
                ties.clear();
            }
            if (count[l] == best)
                ties.push_back(l);
        }
        for (std::uint32_t l : seen)
            count[l] = 0;
        seen.clear();
        std::sort(ties.begin(), ties.end());
    };

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        std::shuffle(order.begin(), order.end(), rng);
        bool changed = false;
        for (NodeId u : order) {
            if (g.degree(u) == 0)
                continue;
            top_labels(u);
            if (std::binary_search(ties.begin(), ties.end(), label[u]))
                continue;
            if (ties.size() == 1) {
                label[u] = ties.front();
            } else {
                std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
                label[u] = ties[pick(rng)];
            }
            changed = true;
        }
        if (!changed)
            break;
    }
    return Partition::from_labels(label);
}

enum class Detector { Louvain, Greedy, LabelPropagation };

inline std::string_view detector_name(Detector d) {
    switch (d) {
    case Detector::Louvain:
        return "louvain";
    case Detector::Greedy:
        return "greedy";
    case Detector::LabelPropagation:
        return "labelprop";
    }
    return "?";
}

inline Detector parse_detector(std::string_view s) {
    if (s == "louvain")
        return Detector::Louvain;
    if (s == "greedy")
        return Detector::Greedy;
    if (s == "labelprop")
        return Detector::LabelPropagation;
    throw ConfigError("unknown detector '" + std::string(s) + "'");
}

inline Partition detect(const Graph& g, Detector d, std::uint64_t seed) {
    switch (d) {
    case Detector::Louvain:
        return louvain(g, seed);
    case Detector::Greedy:
        return greedy_modularity(g);
    case Detector::LabelPropagation:
        return label_propagation(g, seed);
    }
    throw ConfigError("unknown detector");
}

} // namespace epa
