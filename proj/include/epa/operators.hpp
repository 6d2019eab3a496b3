#pragma once

#include <algorithm>
#include <random>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include "epa/attack.hpp"

namespace epa {

using Rng = std::mt19937_64;

namespace detail {

/// k distinct elements of `pool`, uniformly, sorted.
inline std::vector<LinkId> sample_distinct(std::span<const LinkId> pool, std::size_t k, Rng& rng) {
    std::vector<LinkId> out;
    if (k == 0)
        return out;
    if (k * 4 < pool.size()) {
        std::unordered_set<std::size_t> picked;
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        while (out.size() < k) {
            const std::size_t i = pick(rng);
            if (picked.insert(i).second)
                out.push_back(pool[i]);
        }
    } else {
        std::vector<LinkId> copy(pool.begin(), pool.end());
        for (std::size_t i = 0; i < k; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, copy.size() - 1);
            std::swap(copy[i], copy[pick(rng)]);
        }
        out.assign(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(k));
    }
    std::sort(out.begin(), out.end());
    return out;
}

template <typename T>
std::vector<T> without(const std::vector<T>& a, const std::vector<T>& b) {
    std::vector<T> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

/// Target-node seeding: links towards a randomly chosen foreign community
/// first, moving to another foreign community once it is exhausted.
/// Deletions (rewire mode) prefer links leaving that community.
inline Chromosome seed_target_node(const AttackContext& ctx, std::size_t budget, Rng& rng) {
    const NodeId t = ctx.target_node;
    const CommunityId home = ctx.baseline.community_of(t);
    std::vector<CommunityId> foreign;
    for (CommunityId c = 0; c < ctx.baseline.community_count(); ++c)
        if (c != home)
            foreign.push_back(c);
    std::shuffle(foreign.begin(), foreign.end(), rng);

    Chromosome c;
    std::vector<char> chosen_comm(ctx.baseline.community_count(), 0);
    std::unordered_set<LinkId> taken;
    CommunityId first_pick = home;
    for (CommunityId comm : foreign) {
        if (c.additions.size() == budget)
            break;
        if (first_pick == home)
            first_pick = comm;
        std::vector<LinkId> candidates;
        for (NodeId v : ctx.baseline.members(comm))
            if (auto id = ctx.index.nonedge_index({t, v}))
                candidates.push_back(*id);
        std::shuffle(candidates.begin(), candidates.end(), rng);
        for (LinkId id : candidates) {
            if (c.additions.size() == budget)
                break;
            c.additions.push_back(id);
            taken.insert(id);
        }
    }
    if (c.additions.size() < budget) {
        std::vector<LinkId> rest;
        for (LinkId id : ctx.add_pool)
            if (!taken.count(id))
                rest.push_back(id);
        auto extra = sample_distinct(rest, budget - c.additions.size(), rng);
        c.additions.insert(c.additions.end(), extra.begin(), extra.end());
    }

    if (!ctx.add_only) {
        std::vector<LinkId> leaving;
        std::vector<LinkId> staying;
        const auto nb = ctx.graph.neighbors(t);
        const auto ids = ctx.graph.incident_edges(t);
        for (std::size_t k = 0; k < nb.size(); ++k)
            (ctx.baseline.community_of(nb[k]) == first_pick ? staying : leaving).push_back(ids[k]);
        std::shuffle(leaving.begin(), leaving.end(), rng);
        std::shuffle(staying.begin(), staying.end(), rng);
        leaving.insert(leaving.end(), staying.begin(), staying.end());
        c.deletions.assign(leaving.begin(), leaving.begin() + static_cast<std::ptrdiff_t>(budget));
    }
    c.normalize();
    return c;
}

} // namespace detail

/// P chromosomes with budgets uniform in [1, θ] and genes uniform over the
/// scale's admissible sets (target-node scale uses the community-directed
/// seeding instead).
inline std::vector<Chromosome> initialize_population(const AttackContext& ctx, Rng& rng) {
    std::vector<Chromosome> pop;
    pop.reserve(ctx.config.population);
    std::uniform_int_distribution<std::size_t> budget(1, ctx.max_budget);
    const bool node_scale = std::holds_alternative<TargetNodeScale>(ctx.scale);
    for (std::size_t i = 0; i < ctx.config.population; ++i) {
        const std::size_t b = budget(rng);
        if (node_scale) {
            pop.push_back(detail::seed_target_node(ctx, b, rng));
        } else {
            Chromosome c;
            c.additions = detail::sample_distinct(ctx.add_pool, b, rng);
            if (!ctx.add_only)
                c.deletions = detail::sample_distinct(ctx.del_pool, b, rng);
            pop.push_back(std::move(c));
        }
    }
    return pop;
}

/// P(O_i) = φ_i / Σφ; uniform when every fitness is zero.
inline std::vector<double> roulette_probabilities(std::span<const double> fitness) {
    double total = 0.0;
    for (double f : fitness) {
        if (f < 0.0)
            throw Error("roulette selection needs non-negative fitness");
        total += f;
    }
    std::vector<double> p(fitness.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = total > 0.0 ? fitness[i] / total : 1.0 / static_cast<double>(p.size());
    return p;
}

/// `count` indices drawn with replacement by roulette wheel.
inline std::vector<std::size_t> roulette_select(std::span<const double> fitness, std::size_t count, Rng& rng) {
    const auto p = roulette_probabilities(fitness);
    WeightedSampler wheel(p);
    std::vector<std::size_t> out(count);
    for (auto& i : out)
        i = wheel(rng);
    return out;
}

/// Step-4 admissibility of a draw (r_i, r_j) for parents with budgets β_i, β_j.
constexpr bool crossover_budgets_admissible(std::size_t bi, std::size_t bj, std::size_t ri, std::size_t rj,
                                            std::size_t theta) {
    const auto new_i = static_cast<long long>(bi) - static_cast<long long>(ri) + static_cast<long long>(rj);
    const auto new_j = static_cast<long long>(bj) + static_cast<long long>(ri) - static_cast<long long>(rj);
    const auto t = static_cast<long long>(theta);
    return new_i >= 1 && new_i <= t && new_j >= 1 && new_j <= t;
}

inline constexpr int crossover_max_redraws = 50;

/// Non-equal crossover. Genes shared by both parents are not exchangeable;
/// the parents trade r_i and r_j of their remaining addition and deletion
/// genes, so budgets move to β_i - r_i + r_j and β_j + r_i - r_j. Draws that
/// leave either budget outside [1, θ] are redrawn; after 50 failed draws, or
/// when a parent has nothing exchangeable, the parents are returned unchanged.
inline std::pair<Chromosome, Chromosome> crossover_nonequal(const Chromosome& a, const Chromosome& b, std::size_t theta,
                                                            bool add_only, Rng& rng) {
    const auto xa_add = detail::without(a.additions, b.additions);
    const auto xb_add = detail::without(b.additions, a.additions);
    const auto xa_del = detail::without(a.deletions, b.deletions);
    const auto xb_del = detail::without(b.deletions, a.deletions);
    const std::size_t cap_a = add_only ? xa_add.size() : std::min(xa_add.size(), xa_del.size());
    const std::size_t cap_b = add_only ? xb_add.size() : std::min(xb_add.size(), xb_del.size());
    if (cap_a == 0 || cap_b == 0)
        return {a, b};

    std::uniform_int_distribution<std::size_t> draw_a(1, cap_a);
    std::uniform_int_distribution<std::size_t> draw_b(1, cap_b);
    std::size_t ra = 0;
    std::size_t rb = 0;
    bool ok = false;
    for (int attempt = 0; attempt < crossover_max_redraws && !ok; ++attempt) {
        ra = draw_a(rng);
        rb = draw_b(rng);
        ok = crossover_budgets_admissible(a.budget(), b.budget(), ra, rb, theta);
    }
    if (!ok)
        return {a, b};

    const auto give_a_add = detail::sample_distinct(xa_add, ra, rng);
    const auto give_b_add = detail::sample_distinct(xb_add, rb, rng);
    Chromosome na;
    Chromosome nb;
    na.additions = detail::without(a.additions, give_a_add);
    na.additions.insert(na.additions.end(), give_b_add.begin(), give_b_add.end());
    nb.additions = detail::without(b.additions, give_b_add);
    nb.additions.insert(nb.additions.end(), give_a_add.begin(), give_a_add.end());
    if (!add_only) {
        const auto give_a_del = detail::sample_distinct(xa_del, ra, rng);
        const auto give_b_del = detail::sample_distinct(xb_del, rb, rng);
        na.deletions = detail::without(a.deletions, give_a_del);
        na.deletions.insert(na.deletions.end(), give_b_del.begin(), give_b_del.end());
        nb.deletions = detail::without(b.deletions, give_b_del);
        nb.deletions.insert(nb.deletions.end(), give_a_del.begin(), give_a_del.end());
    }
    na.normalize();
    nb.normalize();
    return {std::move(na), std::move(nb)};
}

namespace detail {

inline void mutate_genes(std::vector<LinkId>& genes, std::span<const LinkId> pool, const WeightedSampler& sampler,
                         double rate, Rng& rng) {
    if (genes.empty() || rate <= 0.0 || sampler.empty())
        return;
    constexpr int max_redraws = 32;
    std::bernoulli_distribution flip(rate);
    for (auto& g : genes) {
        if (!flip(rng))
            continue;
        for (int attempt = 0; attempt < max_redraws; ++attempt) {
            const LinkId candidate = pool[sampler(rng)];
            if (candidate == g || std::find(genes.begin(), genes.end(), candidate) == genes.end()) {
                g = candidate;
                break;
            }
        }
    }
    std::sort(genes.begin(), genes.end());
}

} // namespace detail

/// Each gene is replaced with probability `rate`: additions by a non-edge
/// drawn ∝ λ (distance on the original graph), deletions by an edge drawn
/// ∝ 1/C_B. Draws that would duplicate a gene are redrawn; the gene is kept
/// when no fresh candidate turns up.
inline Chromosome mutate(Chromosome c, const AttackContext& ctx, double rate, Rng& rng) {
    detail::mutate_genes(c.additions, ctx.add_pool, ctx.add_sampler, rate, rng);
    detail::mutate_genes(c.deletions, ctx.del_pool, ctx.del_sampler, rate, rng);
    return c;
}

} // namespace epa
