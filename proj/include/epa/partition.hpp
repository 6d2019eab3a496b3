#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "epa/error.hpp"
#include "epa/graph.hpp"

namespace epa {

using CommunityId = std::uint32_t;

/// Node-to-community assignment with dense community IDs 0..k-1.
///
/// IDs are canonical: communities are numbered in order of their smallest
/// member, so two partitions describing the same node sets compare equal.
class Partition {
public:
    Partition() = default;

    /// Accepts arbitrary labels and relabels them densely.
    template <typename Label>
    static Partition from_labels(std::span<const Label> labels) {
        Partition p;
        p.assignment_.resize(labels.size());
        std::unordered_map<Label, CommunityId> dense;
        for (std::size_t u = 0; u < labels.size(); ++u) {
            const auto [it, fresh] = dense.try_emplace(labels[u], static_cast<CommunityId>(dense.size()));
            p.assignment_[u] = it->second;
        }
        p.count_ = dense.size();
        return p;
    }

    template <typename Label>
    static Partition from_labels(const std::vector<Label>& labels) {
        return from_labels(std::span<const Label>(labels));
    }

    static Partition from_communities(std::size_t n, const std::vector<std::vector<NodeId>>& groups) {
        constexpr auto unset = static_cast<CommunityId>(-1);
        std::vector<CommunityId> labels(n, unset);
        for (std::size_t c = 0; c < groups.size(); ++c) {
            for (NodeId u : groups[c]) {
                if (u >= n)
                    throw Error("community member " + std::to_string(u) + " out of range");
                if (labels[u] != unset)
                    throw Error("node " + std::to_string(u) + " assigned twice");
                labels[u] = static_cast<CommunityId>(c);
            }
        }
        for (std::size_t u = 0; u < n; ++u)
            if (labels[u] == unset)
                throw Error("node " + std::to_string(u) + " not assigned");
        return from_labels(labels);
    }

    static Partition singletons(std::size_t n) {
        std::vector<CommunityId> labels(n);
        for (std::size_t u = 0; u < n; ++u)
            labels[u] = static_cast<CommunityId>(u);
        return from_labels(labels);
    }

    static Partition whole(std::size_t n) { return from_labels(std::vector<CommunityId>(n, 0)); }

    std::size_t node_count() const noexcept { return assignment_.size(); }
    std::size_t community_count() const noexcept { return count_; }

    CommunityId community_of(NodeId u) const { return assignment_[u]; }
    std::span<const CommunityId> assignment() const noexcept { return assignment_; }

    std::vector<std::vector<NodeId>> communities() const {
        std::vector<std::vector<NodeId>> out(count_);
        for (std::size_t u = 0; u < assignment_.size(); ++u)
            out[assignment_[u]].push_back(static_cast<NodeId>(u));
        return out;
    }

    std::vector<NodeId> members(CommunityId c) const {
        std::vector<NodeId> out;
        for (std::size_t u = 0; u < assignment_.size(); ++u)
            if (assignment_[u] == c)
                out.push_back(static_cast<NodeId>(u));
        return out;
    }

    std::vector<std::size_t> sizes() const {
        std::vector<std::size_t> out(count_, 0);
        for (CommunityId c : assignment_)
            ++out[c];
        return out;
    }

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<CommunityId> assignment_;
    std::size_t count_ = 0;
};

} // namespace epa
