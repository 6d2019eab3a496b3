#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "epa/graph.hpp"

namespace epa {

/// Dense all-pairs hop distances. Pairs in different components hold the
/// sentinel n, which is larger than any real distance.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, static_cast<std::uint32_t>(n)) {}

    std::size_t node_count() const noexcept { return n_; }
    std::uint32_t sentinel() const noexcept { return static_cast<std::uint32_t>(n_); }

    std::uint32_t operator()(NodeId u, NodeId v) const { return d_[std::size_t{u} * n_ + v]; }
    std::uint32_t& at(NodeId u, NodeId v) { return d_[std::size_t{u} * n_ + v]; }

    std::span<const std::uint32_t> row(NodeId u) const { return {d_.data() + std::size_t{u} * n_, n_}; }

private:
    std::size_t n_ = 0;
    std::vector<std::uint32_t> d_;
};

inline DistanceMatrix all_pairs_distances(const Graph& g) {
    const std::size_t n = g.node_count();
    DistanceMatrix dist(n);
    std::vector<NodeId> queue(n);
    std::vector<std::uint32_t> level(n);
    constexpr auto unseen = std::numeric_limits<std::uint32_t>::max();
    for (NodeId s = 0; s < n; ++s) {
        std::fill(level.begin(), level.end(), unseen);
        std::size_t head = 0;
        std::size_t tail = 0;
        queue[tail++] = s;
        level[s] = 0;
        while (head < tail) {
            const NodeId u = queue[head++];
            for (NodeId w : g.neighbors(u)) {
                if (level[w] == unseen) {
                    level[w] = level[u] + 1;
                    queue[tail++] = w;
                }
            }
        }
        for (NodeId v = 0; v < n; ++v)
            if (level[v] != unseen)
                dist.at(s, v) = level[v];
    }
    return dist;
}

struct Betweenness {
    std::vector<double> nodes;
    std::vector<double> edges; // indexed by edge ID
};

/// Brandes accumulation over unordered pairs {s,t}: every edge on a shortest
/// s-t path receives sigma(s,t|e)/sigma(s,t). Endpoint pairs count for edges,
/// not for node scores.
inline Betweenness brandes_betweenness(const Graph& g) {
    const std::size_t n = g.node_count();
    Betweenness out;
    out.nodes.assign(n, 0.0);
    out.edges.assign(g.edge_count(), 0.0);

    std::vector<NodeId> order(n);
    std::vector<std::int64_t> level(n);
    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    for (NodeId s = 0; s < n; ++s) {
        std::fill(level.begin(), level.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::size_t head = 0;
        std::size_t tail = 0;
        order[tail++] = s;
        level[s] = 0;
        sigma[s] = 1.0;
        while (head < tail) {
            const NodeId u = order[head++];
            for (NodeId w : g.neighbors(u)) {
                if (level[w] < 0) {
                    level[w] = level[u] + 1;
                    order[tail++] = w;
                }
                if (level[w] == level[u] + 1)
                    sigma[w] += sigma[u];
            }
        }
        // Reverse BFS order: predecessors of w are neighbors one level closer.
        for (std::size_t i = tail; i-- > 1;) {
            const NodeId w = order[i];
            const auto nb = g.neighbors(w);
            const auto ids = g.incident_edges(w);
            for (std::size_t k = 0; k < nb.size(); ++k) {
                const NodeId v = nb[k];
                if (level[v] == level[w] - 1) {
                    const double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                    out.edges[ids[k]] += c;
                    delta[v] += c;
                }
            }
            out.nodes[w] += delta[w];
        }
    }
    for (auto& x : out.edges)
        x /= 2.0;
    for (auto& x : out.nodes)
        x /= 2.0;
    return out;
}

inline std::vector<double> edge_betweenness(const Graph& g) { return brandes_betweenness(g).edges; }
inline std::vector<double> node_betweenness(const Graph& g) { return brandes_betweenness(g).nodes; }

/// Number of connected components of the subgraph induced by `members`.
inline std::size_t induced_component_count(const Graph& g, std::span<const NodeId> members) {
    std::vector<char> inside(g.node_count(), 0);
    for (NodeId u : members)
        inside[u] = 1;
    std::vector<char> seen(g.node_count(), 0);
    std::vector<NodeId> stack;
    std::size_t components = 0;
    for (NodeId s : members) {
        if (seen[s])
            continue;
        ++components;
        seen[s] = 1;
        stack.push_back(s);
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (NodeId w : g.neighbors(u)) {
                if (inside[w] && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
    }
    return components;
}

} // namespace epa
