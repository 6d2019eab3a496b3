#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "epa/error.hpp"

namespace epa {

using NodeId = std::uint32_t;
using LinkId = std::uint64_t;

/// Unordered node pair stored with u < v.
struct NodePair {
    NodeId u = 0;
    NodeId v = 0;

    NodePair() = default;
    NodePair(NodeId a, NodeId b) : u(std::min(a, b)), v(std::max(a, b)) {}

    friend auto operator<=>(const NodePair&, const NodePair&) = default;
    friend bool operator==(const NodePair&, const NodePair&) = default;
};

/// Position of {u,v} (u < v) in the lexicographic order of all C(n,2) pairs.
constexpr std::uint64_t pair_rank(NodePair p, std::size_t n) noexcept {
    const std::uint64_t u = p.u;
    return u * (2 * static_cast<std::uint64_t>(n) - u - 1) / 2 + (p.v - p.u - 1);
}

inline NodePair pair_from_rank(std::uint64_t rank, std::size_t n) {
    // Largest u whose first rank is <= rank.
    std::uint64_t lo = 0;
    std::uint64_t hi = n - 1;
    const auto first = [n](std::uint64_t u) { return u * (2 * static_cast<std::uint64_t>(n) - u - 1) / 2; };
    while (lo + 1 < hi) {
        const std::uint64_t mid = (lo + hi) / 2;
        if (first(mid) <= rank)
            lo = mid;
        else
            hi = mid;
    }
    const std::uint64_t u = lo;
    return {static_cast<NodeId>(u), static_cast<NodeId>(u + 1 + (rank - first(u)))};
}

struct DegreeSequence {
    std::vector<std::size_t> values;

    std::size_t size() const noexcept { return values.size(); }
    std::size_t operator[](std::size_t i) const { return values[i]; }
    std::size_t sum() const { return std::accumulate(values.begin(), values.end(), std::size_t{0}); }
};

/// Immutable simple undirected graph on nodes 0..n-1.
///
/// Edges are kept in lexicographic order, so an edge's position in edges()
/// is also its ID in the link-index space. Adjacency is stored CSR-style
/// with sorted neighbor lists; every adjacency entry knows its edge ID.
class Graph {
public:
    Graph() = default;

    /// Throws GraphError on self-loops, duplicate pairs or out-of-range endpoints.
    Graph(std::size_t n, std::vector<NodePair> edges) : n_(n), edges_(std::move(edges)) {
        for (const auto& e : edges_) {
            if (e.u == e.v)
                throw GraphError("self-loop on node " + std::to_string(e.u));
            if (e.v >= n_)
                throw GraphError("edge endpoint " + std::to_string(e.v) + " out of range");
        }
        std::sort(edges_.begin(), edges_.end());
        if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
            throw GraphError("duplicate edge");

        offsets_.assign(n_ + 1, 0);
        for (const auto& e : edges_) {
            ++offsets_[e.u + 1];
            ++offsets_[e.v + 1];
        }
        std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
        targets_.resize(2 * edges_.size());
        edge_ids_.resize(2 * edges_.size());
        std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
        // Edges are sorted, so filling in this order leaves every neighbor list sorted.
        for (std::size_t id = 0; id < edges_.size(); ++id) {
            const auto [u, v] = edges_[id];
            targets_[cursor[u]] = v;
            edge_ids_[cursor[u]++] = id;
        }
        for (std::size_t id = 0; id < edges_.size(); ++id) {
            const auto [u, v] = edges_[id];
            targets_[cursor[v]] = u;
            edge_ids_[cursor[v]++] = id;
        }
        for (NodeId u = 0; u < n_; ++u)
            sort_neighbors(u);
    }

    std::size_t node_count() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    std::span<const NodePair> edges() const noexcept { return edges_; }

    std::span<const NodeId> neighbors(NodeId u) const {
        return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
    }

    /// Edge IDs aligned with neighbors(u).
    std::span<const std::size_t> incident_edges(NodeId u) const {
        return {edge_ids_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
    }

    std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }

    bool has_edge(NodeId a, NodeId b) const {
        if (a == b || a >= n_ || b >= n_)
            return false;
        const auto nb = neighbors(degree(a) <= degree(b) ? a : b);
        return std::binary_search(nb.begin(), nb.end(), degree(a) <= degree(b) ? b : a);
    }

    std::optional<std::size_t> edge_id(NodePair p) const {
        const auto it = std::lower_bound(edges_.begin(), edges_.end(), p);
        if (it == edges_.end() || *it != p)
            return std::nullopt;
        return static_cast<std::size_t>(it - edges_.begin());
    }

    DegreeSequence degrees() const {
        DegreeSequence d;
        d.values.resize(n_);
        for (NodeId u = 0; u < n_; ++u)
            d.values[u] = degree(u);
        return d;
    }

    friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

private:
    void sort_neighbors(NodeId u) {
        const std::size_t b = offsets_[u];
        const std::size_t e = offsets_[u + 1];
        std::vector<std::pair<NodeId, std::size_t>> tmp;
        tmp.reserve(e - b);
        for (std::size_t i = b; i < e; ++i)
            tmp.emplace_back(targets_[i], edge_ids_[i]);
        if (std::is_sorted(tmp.begin(), tmp.end()))
            return;
        std::sort(tmp.begin(), tmp.end());
        for (std::size_t i = b; i < e; ++i)
            std::tie(targets_[i], edge_ids_[i]) = tmp[i - b];
    }

    std::size_t n_ = 0;
    std::vector<NodePair> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> targets_;
    std::vector<std::size_t> edge_ids_;
};

/// Bijections between node pairs and the two gene spaces: existing links
/// (deletion genes) and absent links (addition genes). Both enumerate pairs
/// in lexicographic order.
class LinkIndexSpace {
public:
    explicit LinkIndexSpace(const Graph& g) : n_(g.node_count()), edges_(g.edges().begin(), g.edges().end()) {
        edge_ranks_.reserve(edges_.size());
        for (const auto& e : edges_)
            edge_ranks_.push_back(pair_rank(e, n_));
    }

    std::size_t node_count() const noexcept { return n_; }
    std::uint64_t pair_count() const noexcept { return n_ < 2 ? 0 : std::uint64_t{n_} * (n_ - 1) / 2; }
    std::uint64_t edge_count() const noexcept { return edges_.size(); }
    std::uint64_t nonedge_count() const noexcept { return pair_count() - edges_.size(); }

    std::optional<LinkId> edge_index(NodePair p) const {
        if (!valid(p))
            return std::nullopt;
        const auto r = pair_rank(p, n_);
        const auto it = std::lower_bound(edge_ranks_.begin(), edge_ranks_.end(), r);
        if (it == edge_ranks_.end() || *it != r)
            return std::nullopt;
        return static_cast<LinkId>(it - edge_ranks_.begin());
    }

    std::optional<LinkId> nonedge_index(NodePair p) const {
        if (!valid(p))
            return std::nullopt;
        const auto r = pair_rank(p, n_);
        const auto it = std::lower_bound(edge_ranks_.begin(), edge_ranks_.end(), r);
        if (it != edge_ranks_.end() && *it == r)
            return std::nullopt;
        return r - static_cast<std::uint64_t>(it - edge_ranks_.begin());
    }

    NodePair edge_pair(LinkId id) const {
        if (id >= edges_.size())
            throw GraphError("edge gene " + std::to_string(id) + " out of range");
        return edges_[id];
    }

    NodePair nonedge_pair(LinkId id) const {
        if (id >= nonedge_count())
            throw GraphError("non-edge gene " + std::to_string(id) + " out of range");
        // Smallest rank r with (r + 1) - #edges(<= r) == id + 1, i.e. the (id+1)-th non-edge.
        std::uint64_t lo = id;
        std::uint64_t hi = id + edges_.size();
        while (lo < hi) {
            const std::uint64_t mid = (lo + hi) / 2;
            const auto edges_le = static_cast<std::uint64_t>(
                std::upper_bound(edge_ranks_.begin(), edge_ranks_.end(), mid) - edge_ranks_.begin());
            if (mid + 1 - edges_le >= id + 1)
                hi = mid;
            else
                lo = mid + 1;
        }
        return pair_from_rank(lo, n_);
    }

private:
    bool valid(NodePair p) const noexcept { return p.u != p.v && p.v < n_; }

    std::size_t n_;
    std::vector<NodePair> edges_;
    std::vector<std::uint64_t> edge_ranks_;
};

inline LinkIndexSpace index_bijection(const Graph& g) { return LinkIndexSpace(g); }

/// Link additions E+ and deletions E- relative to a base graph.
struct Perturbation {
    std::vector<NodePair> additions;
    std::vector<NodePair> deletions;

    bool empty() const noexcept { return additions.empty() && deletions.empty(); }
    std::size_t budget() const noexcept { return std::max(additions.size(), deletions.size()); }

    void normalize() {
        std::sort(additions.begin(), additions.end());
        std::sort(deletions.begin(), deletions.end());
    }

    friend bool operator==(const Perturbation&, const Perturbation&) = default;
};

/// Ē = (E ∪ E+) \ E-. Node set is unchanged.
inline Graph apply_perturbation(const Graph& g, const Perturbation& p) {
    std::vector<NodePair> adds = p.additions;
    std::vector<NodePair> dels = p.deletions;
    std::sort(adds.begin(), adds.end());
    std::sort(dels.begin(), dels.end());
    if (std::adjacent_find(adds.begin(), adds.end()) != adds.end())
        throw InvalidPerturbation("duplicate addition");
    if (std::adjacent_find(dels.begin(), dels.end()) != dels.end())
        throw InvalidPerturbation("duplicate deletion");
    for (const auto& a : adds) {
        if (a.u == a.v || a.v >= g.node_count())
            throw InvalidPerturbation("addition (" + std::to_string(a.u) + "," + std::to_string(a.v) + ") is not a node pair");
        if (g.has_edge(a.u, a.v))
            throw InvalidPerturbation("addition (" + std::to_string(a.u) + "," + std::to_string(a.v) + ") already exists");
    }
    for (const auto& d : dels)
        if (!g.has_edge(d.u, d.v))
            throw InvalidPerturbation("deletion (" + std::to_string(d.u) + "," + std::to_string(d.v) + ") is not an edge");

    std::vector<NodePair> out;
    out.reserve(g.edge_count() + adds.size());
    std::set_difference(g.edges().begin(), g.edges().end(), dels.begin(), dels.end(), std::back_inserter(out));
    const auto mid = out.size();
    out.insert(out.end(), adds.begin(), adds.end());
    std::inplace_merge(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(mid), out.end());
    return Graph(g.node_count(), std::move(out));
}

} // namespace epa
