#pragma once

#include <cmath>
#include <span>

#include "epa/attack.hpp"
#include "epa/detection.hpp"
#include "epa/metrics.hpp"

namespace epa {

/// Entropy term of the global fitness, each part normalized by its bound.
/// A side with a single community has nothing to spread over and scores 0.
inline double global_attack_effect(const ConfusionMatrix& m) {
    const auto h = global_entropies(m);
    const double rows = m.cols() > 1 ? h.rows / std::log2(static_cast<double>(m.cols())) : 0.0;
    const double cols = m.rows() > 1 ? h.columns / std::log2(static_cast<double>(m.rows())) : 0.0;
    return rows + cols;
}

/// E_Mr + E_Mc / log2 N_a with N_a the number of detected communities.
inline double target_attack_effect(const TargetConfusion& t, std::size_t n) {
    const auto h = target_entropies(t, n);
    std::size_t detected = 0;
    for (const auto& row : t.rows)
        detected += row.size() > 0;
    const double spread = detected > 1 ? h.columns / std::log2(static_cast<double>(detected)) : 0.0;
    return h.rows + spread;
}

/// d_t / (d_t + β) when the node left its community, 0 otherwise.
inline double target_node_fitness_value(std::size_t degree, std::size_t added, bool success) {
    if (!success)
        return 0.0;
    return static_cast<double>(degree) / static_cast<double>(degree + added);
}

/// δ: the node's new community holds fewer than ε of its members from the
/// node's original community.
inline bool node_attack_succeeded(const Partition& before, const Partition& after, NodeId t, double epsilon) {
    const CommunityId home = before.community_of(t);
    const CommunityId now = after.community_of(t);
    std::size_t size = 0;
    std::size_t shared = 0;
    for (NodeId u = 0; u < after.node_count(); ++u) {
        if (after.community_of(u) != now)
            continue;
        ++size;
        shared += before.community_of(u) == home;
    }
    return static_cast<double>(shared) / static_cast<double>(size) < epsilon;
}

inline double fitness_global(const AttackContext& ctx, const Chromosome& c) {
    const Graph adv = adversarial_graph(ctx, c);
    const Partition after = louvain(adv, ctx.surrogate_seed);
    const double d = degree_distance(ctx.degrees, adv.degrees());
    const double psi = attenuation(d / static_cast<double>(ctx.graph.edge_count()), ctx.config.attenuation);
    return psi * global_attack_effect(confusion(ctx.baseline, after));
}

inline double fitness_target_community(const AttackContext& ctx, const Chromosome& c) {
    const Graph adv = adversarial_graph(ctx, c);
    const Partition after = louvain(adv, ctx.surrogate_seed);
    const double d = degree_distance(ctx.degrees, adv.degrees());
    const double psi = attenuation(d / static_cast<double>(ctx.target_links), ctx.config.attenuation);
    return psi * target_attack_effect(target_confusion(ctx.target_members, after), ctx.graph.node_count());
}

inline double fitness_target_node(const AttackContext& ctx, const Chromosome& c) {
    const Graph adv = adversarial_graph(ctx, c);
    const Partition after = louvain(adv, ctx.surrogate_seed);
    const bool ok = node_attack_succeeded(ctx.baseline, after, ctx.target_node, ctx.config.epsilon);
    return target_node_fitness_value(ctx.target_degree, c.additions.size(), ok);
}

inline double fitness_epa(const AttackContext& ctx, const Chromosome& c) {
    switch (ctx.scale.index()) {
    case 0:
        return fitness_global(ctx, c);
    case 1:
        return fitness_target_community(ctx, c);
    default:
        return fitness_target_node(ctx, c);
    }
}

} // namespace epa
