#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "epa/engine.hpp"
#include "epa/generators.hpp"

namespace epa {
namespace {

Graph two_five_cliques() {
    std::vector<NodePair> e;
    for (NodeId base : {0u, 5u})
        for (NodeId u = 0; u < 5; ++u)
            for (NodeId v = u + 1; v < 5; ++v)
                e.push_back({base + u, base + v});
    e.push_back({4, 5});
    return Graph(10, e);
}

GAConfig config(std::size_t theta, std::size_t generations, std::uint64_t seed) {
    GAConfig cfg;
    cfg.population = 30;
    cfg.generations = generations;
    cfg.max_budget = theta;
    cfg.seed = seed;
    return cfg;
}

} // namespace

class EngineGTest : public testing::Test {};

TEST_F(EngineGTest, testEliteNonDecreasingAndValid) {
    const auto pg = generate_planted_partition({16, 16, 16}, 0.35, 0.03, 4);
    for (std::size_t scale = 0; scale < 3; ++scale) {
        const AttackScale s = scale == 0   ? AttackScale{GlobalScale{}}
                              : scale == 1 ? AttackScale{TargetCommunityScale{0}}
                                           : AttackScale{TargetNodeScale{7}};
        const AttackContext ctx(pg.graph, s, config(6, 15, 3));
        std::size_t invalid = 0;
        std::size_t seen = 0;
        const auto result = run_ga(ctx, fitness_epa, [&](std::string_view, std::span<const Chromosome> pop) {
            for (const auto& c : pop) {
                ++seen;
                invalid += chromosome_violation(ctx, c).has_value();
            }
        });
        EXPECT_EQ(invalid, 0u) << scale_name(s);
        EXPECT_EQ(seen, 30u * (1 + 2 * 15));
        ASSERT_EQ(result.history.size(), 15u);
        for (std::size_t g = 1; g < result.history.size(); ++g)
            EXPECT_GE(result.history[g], result.history[g - 1]);
        EXPECT_EQ(result.best_fitness, result.history.back());
        EXPECT_EQ(result.best_fitness, fitness_epa(ctx, result.best));
    }
}

TEST_F(EngineGTest, testDeterministicAcrossRunsAndThreads) {
    const auto pg = generate_planted_partition({16, 16, 16}, 0.35, 0.03, 6);
    GAConfig serial = config(5, 10, 21);
    GAConfig parallel = serial;
    parallel.threads = 4;
    const AttackContext a(pg.graph, GlobalScale{}, serial);
    const AttackContext b(pg.graph, GlobalScale{}, parallel);
    const auto r1 = run_ga(a, fitness_epa);
    const auto r2 = run_ga(a, fitness_epa);
    const auto r3 = run_ga(b, fitness_epa);
    EXPECT_EQ(r1.best, r2.best);
    EXPECT_EQ(r1.history, r2.history);
    EXPECT_EQ(r1.best, r3.best);
    EXPECT_EQ(r1.history, r3.history);
    EXPECT_EQ(r1.evaluations, r3.evaluations);
}

TEST_F(EngineGTest, testDifferentSeedsExploreDifferently) {
    const auto pg = generate_planted_partition({16, 16, 16}, 0.35, 0.03, 6);
    const auto r1 = run_epa(pg.graph, GlobalScale{}, config(5, 5, 1));
    const auto r2 = run_epa(pg.graph, GlobalScale{}, config(5, 5, 2));
    EXPECT_NE(r1.best, r2.best);
}

TEST_F(EngineGTest, testReportMatchesBestChromosome) {
    const auto pg = generate_planted_partition({16, 16, 16}, 0.35, 0.03, 2);
    const auto r = run_epa(pg.graph, GlobalScale{}, config(6, 10, 5));
    EXPECT_EQ(r.method, "epa");
    EXPECT_EQ(r.budget, r.best.budget());
    EXPECT_EQ(r.perturbation.additions.size(), r.budget);
    EXPECT_EQ(r.adversarial, apply_perturbation(pg.graph, r.perturbation));
    EXPECT_EQ(r.detected_after, louvain(r.adversarial, 5));
    EXPECT_EQ(r.baseline, louvain(pg.graph, 5));
    EXPECT_FALSE(r.success);
}

TEST_F(EngineGTest, testTargetNodeBridgeEndpointMovesCheaply) {
    // Node 4 has four links inside its clique and the bridge to node 5.
    const Graph g = two_five_cliques();
    const NodeId t = 4;
    GAConfig cfg = config(g.degree(t) - 1, 30, 0);
    const auto r = run_epa(g, TargetNodeScale{t}, cfg);
    ASSERT_TRUE(r.success);
    EXPECT_TRUE(*r.success);
    EXPECT_LT(r.budget, g.degree(t));
    EXPECT_TRUE(node_attack_succeeded(r.baseline, louvain(r.adversarial, cfg.seed), t, 0.5));
    EXPECT_NEAR(*r.degree_increment_pct, 100.0 * r.budget / g.degree(t), 1e-12);
}

TEST_F(EngineGTest, testInfeasibleBeforeLoop) {
    const Graph g(4, {{0, 1}, {1, 2}});
    EXPECT_THROW(run_epa(g, TargetNodeScale{3}, config(2, 5, 0)), InfeasibleAttack);
}

TEST_F(EngineGTest, testConfigValidation) {
    GAConfig cfg;
    cfg.crossover_rate = 1.5;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = GAConfig{};
    cfg.population = 1;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = GAConfig{};
    cfg.max_budget = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = GAConfig{};
    cfg.epsilon = 2.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    GAConfig defaults;
    EXPECT_EQ(defaults.population, 100u);
    EXPECT_EQ(defaults.generations, 200u);
    EXPECT_DOUBLE_EQ(defaults.crossover_rate, 0.6);
    EXPECT_DOUBLE_EQ(defaults.mutation_rate, 0.1);
    EXPECT_DOUBLE_EQ(defaults.attenuation, 4.0);
    EXPECT_DOUBLE_EQ(defaults.epsilon, 0.5);
}

} // namespace epa
