#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gatgrad/graph.hpp"

namespace gatgrad {
namespace {

std::vector<NodeId> as_vector(std::span<const NodeId> s) { return {s.begin(), s.end()}; }

TEST(AugmentTest, EmptyFeature) {
    const auto h = augment(std::span<const double>{});
    ASSERT_EQ(h.size(), 1u);
    EXPECT_EQ(h[0], 1.0);
}

TEST(AugmentTest, PrependsOne) {
    const std::vector<double> one{2.0};
    const auto h1 = augment(one);
    ASSERT_EQ(h1.size(), 2u);
    EXPECT_EQ(h1[0], 1.0);
    EXPECT_EQ(h1[1], 2.0);

    const std::vector<double> two{-1.5, 3.0};
    const auto h2 = augment(two);
    ASSERT_EQ(h2.size(), 3u);
    EXPECT_EQ(h2[0], 1.0);
    EXPECT_EQ(h2[1], -1.5);
    EXPECT_EQ(h2[2], 3.0);
}

TEST(AugmentTest, RejectsNonFiniteWithIndex) {
    const std::vector<double> h{0.0, std::numeric_limits<double>::quiet_NaN()};
    try {
        augment(h);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("entry 1"), std::string::npos) << e.what();
    }
    const std::vector<double> inf{std::numeric_limits<double>::infinity()};
    EXPECT_THROW(augment(inf), InputError);
}

TEST(AugmentTest, LeadingOneAndInjective) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 200; ++trial) {
        Vector x(3), y(3);
        for (int k = 0; k < 3; ++k) {
            x[k] = normal(rng);
            y[k] = (trial % 2 == 0) ? x[k] : normal(rng);
        }
        const auto hx = augment(x);
        const auto hy = augment(y);
        EXPECT_EQ(hx[0], 1.0);
        EXPECT_EQ(hx.values().tail(3), x);
        EXPECT_EQ(hx.values() == hy.values(), x == y);
    }
}

TEST(GraphTest, NeighborLookup) {
    const Graph g(3, {{0, 1}, {0, 2}});
    EXPECT_EQ(as_vector(g.neighbors(0)), (std::vector<NodeId>{1, 2}));
    EXPECT_TRUE(g.neighbors(1).empty());
}

TEST(GraphTest, ExplicitSelfLoopKept) {
    const Graph g(3, {{2, 0}, {2, 2}});
    EXPECT_EQ(as_vector(g.neighbors(2)), (std::vector<NodeId>{0, 2}));
}

TEST(GraphTest, NoImplicitSelfLoops) {
    const Graph g(2, {{0, 1}});
    EXPECT_EQ(as_vector(g.neighbors(0)), (std::vector<NodeId>{1}));
    EXPECT_TRUE(g.neighbors(1).empty());
}

TEST(GraphTest, OrderFollowsEdgeList) {
    const Graph g(4, {{0, 3}, {1, 0}, {0, 1}, {0, 2}});
    EXPECT_EQ(as_vector(g.neighbors(0)), (std::vector<NodeId>{3, 1, 2}));
    const Graph again(4, {{0, 3}, {1, 0}, {0, 1}, {0, 2}});
    EXPECT_EQ(as_vector(g.neighbors(0)), as_vector(again.neighbors(0)));
}

TEST(GraphTest, RejectsOutOfRange) {
    EXPECT_THROW(Graph(2, {{0, 2}}), InputError);
    EXPECT_THROW(Graph(2, {{5, 0}}), InputError);
    const Graph g(2, {});
    EXPECT_THROW(g.neighbors(2), InputError);
}

TEST(GraphTest, RejectsDuplicateEdges) {
    EXPECT_THROW(Graph(3, {{0, 1}, {0, 2}, {0, 1}}), InputError);
}

TEST(GraphTest, RejectsEmptyGraph) {
    EXPECT_THROW(Graph(0, {}), InputError);
}

TEST(GraphTest, NeighborsMatchEdgeSet) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng() % 6;
        std::vector<Edge> edges;
        for (NodeId i = 0; i < n; ++i) {
            for (NodeId j = 0; j < n; ++j) {
                if (rng() % 2 == 0) {
                    edges.push_back({i, j});
                }
            }
        }
        std::shuffle(edges.begin(), edges.end(), rng);
        const Graph g(n, edges);
        for (NodeId i = 0; i < n; ++i) {
            std::vector<NodeId> expected;
            for (const auto& e : edges) {
                if (e.target == i) {
                    expected.push_back(e.source);
                }
            }
            EXPECT_EQ(as_vector(g.neighbors(i)), expected);
        }
    }
}

TEST(FeatureMatrixTest, ValidatesRows) {
    EXPECT_THROW(FeatureMatrix(2, {Vector::Zero(3)}), InputError);
    Vector bad = Vector::Zero(2);
    bad[1] = std::numeric_limits<double>::infinity();
    EXPECT_THROW(FeatureMatrix(2, {bad}), InputError);
    const FeatureMatrix ok(2, {Vector::Ones(2)});
    EXPECT_EQ(ok.row(0), Vector::Ones(2));
    EXPECT_THROW(ok.row(1), InputError);
}

}  // namespace
}  // namespace gatgrad
