#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "epa/generators.hpp"
#include "epa/graph.hpp"

namespace epa {
namespace {

Graph path(std::size_t n) {
    std::vector<NodePair> e;
    for (NodeId u = 0; u + 1 < n; ++u)
        e.push_back({u, u + 1});
    return Graph(n, e);
}

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    std::vector<NodePair> e;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
            if (coin(rng))
                e.push_back({u, v});
    return Graph(n, e);
}

} // namespace

class GraphGTest : public testing::Test {};

TEST_F(GraphGTest, testRejectsSelfLoopDuplicateAndRange) {
    EXPECT_THROW(Graph(3, {{1, 1}}), GraphError);
    EXPECT_THROW(Graph(3, {{0, 1}, {1, 0}}), GraphError);
    EXPECT_THROW(Graph(3, {{0, 3}}), GraphError);
}

TEST_F(GraphGTest, testDegreeSumAndSymmetry) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Graph g = random_graph(30, 0.2, seed);
        EXPECT_EQ(g.degrees().sum(), 2 * g.edge_count());
        for (NodeId u = 0; u < g.node_count(); ++u)
            for (NodeId v : g.neighbors(u))
                EXPECT_TRUE(g.has_edge(v, u));
    }
}

TEST_F(GraphGTest, testIncidentEdgeIdsMatchPairs) {
    const Graph g = random_graph(25, 0.3, 7);
    for (NodeId u = 0; u < g.node_count(); ++u) {
        const auto nb = g.neighbors(u);
        const auto ids = g.incident_edges(u);
        ASSERT_EQ(nb.size(), ids.size());
        for (std::size_t k = 0; k < nb.size(); ++k)
            EXPECT_EQ(g.edges()[ids[k]], NodePair(u, nb[k]));
    }
}

TEST_F(GraphGTest, testTriangleIndexSpace) {
    const Graph g(3, {{1, 2}, {0, 2}, {0, 1}});
    const LinkIndexSpace idx = index_bijection(g);
    EXPECT_EQ(idx.edge_index({0, 1}), 0u);
    EXPECT_EQ(idx.edge_index({0, 2}), 1u);
    EXPECT_EQ(idx.edge_index({1, 2}), 2u);
    EXPECT_EQ(idx.nonedge_count(), 0u);
}

TEST_F(GraphGTest, testPathSoleNonEdge) {
    const LinkIndexSpace idx(path(3));
    EXPECT_EQ(idx.nonedge_index({0, 2}), 0u);
    EXPECT_EQ(idx.nonedge_index({2, 0}), 0u);
    EXPECT_FALSE(idx.nonedge_index({0, 1}));
}

TEST_F(GraphGTest, testIndexRoundtripExhaustive) {
    for (std::size_t n : {2u, 5u, 20u, 50u}) {
        const Graph g = random_graph(n, 0.3, n);
        const LinkIndexSpace idx(g);
        EXPECT_EQ(idx.edge_count() + idx.nonedge_count(), n * (n - 1) / 2);
        std::set<LinkId> seen_e;
        std::set<LinkId> seen_n;
        LinkId expect_e = 0;
        LinkId expect_n = 0;
        for (NodeId u = 0; u < n; ++u) {
            for (NodeId v = u + 1; v < n; ++v) {
                const NodePair p{u, v};
                EXPECT_EQ(pair_from_rank(pair_rank(p, n), n), p);
                const auto e = idx.edge_index(p);
                const auto ne = idx.nonedge_index(p);
                ASSERT_NE(e.has_value(), ne.has_value());
                if (e) {
                    EXPECT_EQ(*e, expect_e++); // lexicographic enumeration
                    EXPECT_EQ(idx.edge_pair(*e), p);
                    seen_e.insert(*e);
                } else {
                    EXPECT_EQ(*ne, expect_n++);
                    EXPECT_EQ(idx.nonedge_pair(*ne), p);
                    seen_n.insert(*ne);
                }
            }
        }
        EXPECT_EQ(seen_e.size(), idx.edge_count());
        EXPECT_EQ(seen_n.size(), idx.nonedge_count());
    }
}

TEST_F(GraphGTest, testIndexOutOfRangeThrows) {
    const LinkIndexSpace idx(path(3));
    EXPECT_THROW(idx.edge_pair(2), GraphError);
    EXPECT_THROW(idx.nonedge_pair(1), GraphError);
}

TEST_F(GraphGTest, testApplyPerturbation) {
    const Graph g = path(3);
    EXPECT_EQ(apply_perturbation(g, {}), g);

    Perturbation p;
    p.deletions = {{1, 2}};
    p.additions = {{0, 2}};
    const Graph h = apply_perturbation(g, p);
    EXPECT_EQ(h, Graph(3, {{0, 1}, {0, 2}}));
    EXPECT_EQ(h.edge_count(), g.edge_count());

    Perturbation bad;
    bad.deletions = {{0, 2}};
    EXPECT_THROW(apply_perturbation(g, bad), InvalidPerturbation);
    Perturbation bad_add;
    bad_add.additions = {{0, 1}};
    EXPECT_THROW(apply_perturbation(g, bad_add), InvalidPerturbation);
}

TEST_F(GraphGTest, testRewiringPreservesEdgeCount) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Graph g = random_graph(20, 0.25, trial);
        const LinkIndexSpace idx(g);
        const std::size_t b = std::min<std::size_t>({3, idx.edge_count(), idx.nonedge_count()});
        std::vector<LinkId> e(idx.edge_count());
        std::vector<LinkId> ne(idx.nonedge_count());
        std::iota(e.begin(), e.end(), 0);
        std::iota(ne.begin(), ne.end(), 0);
        std::shuffle(e.begin(), e.end(), rng);
        std::shuffle(ne.begin(), ne.end(), rng);
        Perturbation p;
        for (std::size_t k = 0; k < b; ++k) {
            p.deletions.push_back(idx.edge_pair(e[k]));
            p.additions.push_back(idx.nonedge_pair(ne[k]));
        }
        EXPECT_EQ(apply_perturbation(g, p).edge_count(), g.edge_count());
    }
}

class GeneratorGTest : public testing::Test {};

TEST_F(GeneratorGTest, testDegenerateProbabilitiesGiveTwoTriangles) {
    const auto pg = generate_planted_partition({3, 3}, 1.0, 0.0, 1);
    EXPECT_EQ(pg.graph, Graph(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}}));
    EXPECT_EQ(pg.truth, Partition::from_labels(std::vector<int>{0, 0, 0, 1, 1, 1}));
}

TEST_F(GeneratorGTest, testIntraEdgeCountWithinThreeSigma) {
    const auto pg = generate_planted_partition({32, 32, 32, 32}, 0.3, 0.02, 11);
    std::size_t intra = 0;
    for (const auto& e : pg.graph.edges())
        intra += pg.truth.community_of(e.u) == pg.truth.community_of(e.v);
    const double trials = 4.0 * 32.0 * 31.0 / 2.0;
    const double mean = trials * 0.3;
    const double sigma = std::sqrt(trials * 0.3 * 0.7);
    EXPECT_NEAR(static_cast<double>(intra), mean, 3.0 * sigma);
}

TEST_F(GeneratorGTest, testDeterministicGivenSeed) {
    const auto a = generate_planted_partition({10, 12}, 0.5, 0.05, 42);
    const auto b = generate_planted_partition({10, 12}, 0.5, 0.05, 42);
    EXPECT_EQ(a.graph, b.graph);
    EXPECT_EQ(a.truth, b.truth);
}

TEST_F(GeneratorGTest, testInvalidParametersRejected) {
    EXPECT_THROW(generate_planted_partition({}, 0.3, 0.1, 0), ConfigError);
    EXPECT_THROW(generate_planted_partition({4, 4}, 0.1, 0.3, 0), ConfigError);
    EXPECT_THROW(generate_planted_partition({4, 4}, 1.5, 0.0, 0), ConfigError);
}

TEST_F(GeneratorGTest, testIsolatedNodesExhaustAttempts) {
    EXPECT_THROW(generate_planted_partition({1, 1}, 0.0, 0.0, 0), Error);
}

} // namespace epa
