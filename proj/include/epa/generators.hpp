#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "epa/error.hpp"
#include "epa/graph.hpp"
#include "epa/partition.hpp"

namespace epa {

struct PlantedGraph {
    Graph graph;
    Partition truth;
};

/// Planted-partition random graph: pairs inside a block are linked with
/// probability p_in, pairs across blocks with p_out. Draws that leave a node
/// isolated are rejected and redrawn from the same stream.
inline PlantedGraph generate_planted_partition(const std::vector<std::size_t>& sizes, double p_in, double p_out,
                                               std::uint64_t seed, int max_attempts = 100) {
    if (sizes.empty())
        throw ConfigError("planted partition needs at least one community");
    if (!(0.0 <= p_out && p_out <= p_in && p_in <= 1.0))
        throw ConfigError("planted partition requires 0 <= p_out <= p_in <= 1");
    std::vector<CommunityId> block;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        if (sizes[c] == 0)
            throw ConfigError("community sizes must be positive");
        block.insert(block.end(), sizes[c], static_cast<CommunityId>(c));
    }
    const std::size_t n = block.size();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<NodePair> edges;
        std::vector<std::size_t> degree(n, 0);
        for (NodeId u = 0; u < n; ++u) {
            for (NodeId v = u + 1; v < n; ++v) {
                const double p = block[u] == block[v] ? p_in : p_out;
                if (coin(rng) < p) {
                    edges.emplace_back(u, v);
                    ++degree[u];
                    ++degree[v];
                }
            }
        }
        if (std::find(degree.begin(), degree.end(), 0) != degree.end())
            continue;
        return {Graph(n, std::move(edges)), Partition::from_labels(block)};
    }
    throw Error("planted partition kept producing isolated nodes after " + std::to_string(max_attempts) +
                " attempts");
}

} // namespace epa
