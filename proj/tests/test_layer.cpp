#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "gatgrad/layer.hpp"
#include "test_support.hpp"

namespace gatgrad {
namespace {

// D = 1, H = 1, slope 0.2, Theta_R = [0, 1], Theta_L = [0, -1], a = [3].
LayerParams hand_params() {
    LayerParams p = LayerParams::zeros(1, 1);
    p.theta_R << 0.0, 1.0;
    p.theta_L << 0.0, -1.0;
    p.a << 3.0;
    return p;
}

AugmentedFeature aug1(double x) { return augment(Vector::Constant(1, x)); }

TEST(LeakyReluTest, ZeroTakesNegativeBranch) {
    EXPECT_EQ(leaky_relu(0.0, 0.2), 0.0);
    EXPECT_EQ(leaky_relu(-0.0, 0.2), -0.0);
    EXPECT_EQ(leaky_relu(2.0, 0.2), 2.0);
    EXPECT_DOUBLE_EQ(leaky_relu(-2.0, 0.2), -0.4);
}

TEST(ScoreTest, ZeroAttentionVector) {
    LayerParams p = testing::dense_instance(3, 1, 4, 9).params;
    p.a.setZero();
    EXPECT_EQ(score(p, aug1(0.7), aug1(-1.3)), 0.0);
}

TEST(ScoreTest, ZeroProjections) {
    LayerParams p = LayerParams::zeros(3, 1);
    p.a << 1.0, -2.0, 5.0;
    EXPECT_EQ(score(p, aug1(4.0), aug1(-9.0)), 0.0);
}

TEST(ScoreTest, HandEvaluation) {
    // pre-activation 1 - 2 = -1, LeakyReLU -0.2, times 3.
    EXPECT_NEAR(score(hand_params(), aug1(1.0), aug1(2.0)), -0.6, 1e-15);
}

TEST(ScoreTest, ShapeMismatch) {
    EXPECT_THROW(score(hand_params(), augment(Vector::Zero(2)), aug1(1.0)), InputError);
}

TEST(SoftmaxTest, SingleNeighbor) {
    const Vector alpha = softmax_neighbors(Vector::Constant(1, 5.7));
    ASSERT_EQ(alpha.size(), 1);
    EXPECT_EQ(alpha[0], 1.0);
}

TEST(SoftmaxTest, UniformScores) {
    for (const double c : {-4.0, 0.0, 123.0}) {
        const Vector alpha = softmax_neighbors(Vector::Constant(3, c));
        for (const double v : alpha) {
            EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
        }
    }
}

TEST(SoftmaxTest, ClosedFormTwoScores) {
    Vector e(2);
    e << 0.0, std::log(3.0);
    const Vector alpha = softmax_neighbors(e);
    EXPECT_NEAR(alpha[0], 0.25, 1e-15);
    EXPECT_NEAR(alpha[1], 0.75, 1e-15);
}

TEST(SoftmaxTest, EmptyAndNonFinite) {
    EXPECT_EQ(softmax_neighbors(Vector()).size(), 0);
    Vector bad(2);
    bad << 1.0, std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(softmax_neighbors(bad), InputError);
}

TEST(SoftmaxTest, ShiftInvarianceAndNormalization) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 8);
        Vector e(n);
        for (auto& x : e) {
            x = normal(rng);
        }
        const Vector alpha = softmax_neighbors(e);
        EXPECT_NEAR(alpha.sum(), 1.0, 1e-12);
        for (const double kappa : {-1e3, -1.5, 0.25, 1e3}) {
            const Vector shifted = softmax_neighbors((e.array() + kappa).matrix());
            EXPECT_LE((shifted - alpha).cwiseAbs().maxCoeff(), 1e-12);
        }
        for (const double v : alpha) {
            EXPECT_GT(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(UpdateNodeTest, EmptyNeighborhoodGivesBias) {
    LayerParams p = LayerParams::zeros(2, 1);
    p.b << 0.5, -1.0;
    ForwardTrace t;
    t.alpha = Vector();
    EXPECT_EQ(update_node(p, t), p.b);
}

TEST(UpdateNodeTest, SingleNeighbor) {
    LayerParams p = LayerParams::zeros(2, 1);
    p.b << 0.5, -1.0;
    ForwardTrace t;
    t.neighbors = {3};
    t.alpha = Vector::Ones(1);
    t.a3 = {Vector::Constant(2, 2.0)};
    EXPECT_EQ(update_node(p, t), p.b + t.a3[0]);
}

TEST(UpdateNodeTest, HandEvaluation) {
    // b = 1, Theta_L = [0, 1], neighbors h = 2 and 4, alpha = [0.25, 0.75].
    LayerParams p = LayerParams::zeros(1, 1);
    p.b << 1.0;
    p.theta_L << 0.0, 1.0;
    ForwardTrace t;
    t.neighbors = {1, 2};
    t.alpha = (Vector(2) << 0.25, 0.75).finished();
    t.a3 = {p.theta_L * aug1(2.0).values(), p.theta_L * aug1(4.0).values()};
    EXPECT_NEAR(update_node(p, t)[0], 4.5, 1e-15);
}

TEST(UpdateNodeTest, MissingAlpha) {
    ForwardTrace t;
    t.neighbors = {0};
    EXPECT_THROW(update_node(LayerParams::zeros(1, 1), t), InputError);
}

TEST(ForwardTest, IsolatedNode) {
    const Instance inst = testing::dense_instance(3, 2, 3, 1);
    const Graph g(3, {{0, 1}});
    const ForwardTrace t = forward_with_trace(inst.params, g, inst.features, 2);
    EXPECT_EQ(t.size(), 0u);
    EXPECT_EQ(t.alpha.size(), 0);
    EXPECT_EQ(t.h_out, inst.params.b);
}

TEST(ForwardTest, HandInstance) {
    // Target feature 1, single neighbor feature 2: score -0.6, alpha 1, h' = b + Theta_L h_j = -2.
    LayerParams p = hand_params();
    const Graph g(2, {{0, 1}});
    const FeatureMatrix f(1, {Vector::Constant(1, 1.0), Vector::Constant(1, 2.0)});
    const ForwardTrace t = forward_with_trace(p, g, f, 0);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_NEAR(t.e[0], -0.6, 1e-15);
    EXPECT_EQ(t.alpha[0], 1.0);
    EXPECT_NEAR(t.h_out[0], -2.0, 1e-15);
}

TEST(ForwardTest, HandInstanceTwoNeighbors) {
    // Scores chosen so alpha = [0.25, 0.75]; aggregation then matches the
    // update_node hand value 1 + 0.25*2 + 0.75*4 = 4.5.
    LayerParams p = LayerParams::zeros(1, 1);
    p.theta_L << 0.0, 1.0;
    p.theta_R << 10.0, 0.0;  // keeps every pre-activation positive
    p.a << std::log(3.0) / 2.0;
    p.b << 1.0;
    const Graph g(3, {{0, 1}, {0, 2}});
    const FeatureMatrix f(1, {Vector::Constant(1, 0.0), Vector::Constant(1, 2.0), Vector::Constant(1, 4.0)});
    const ForwardTrace t = forward_with_trace(p, g, f, 0);
    EXPECT_NEAR(t.e[1] - t.e[0], std::log(3.0), 1e-14);
    EXPECT_NEAR(t.alpha[0], 0.25, 1e-14);
    EXPECT_NEAR(t.alpha[1], 0.75, 1e-14);
    EXPECT_NEAR(t.h_out[0], 4.5, 1e-13);
}

TEST(ForwardTest, SeededInstance) {
    GenConfig config{5, 3, 4, 2, 42, 0.2};
    const Instance inst = generate_instance(config);
    for (NodeId i = 0; i < 5; ++i) {
        const ForwardTrace t = forward_with_trace(inst.params, inst.graph, inst.features, i);
        EXPECT_TRUE(t.h_out.allFinite());
        ASSERT_GE(t.size(), 2u);
        EXPECT_NEAR(t.alpha.sum(), 1.0, 1e-12);
    }
}

TEST(ForwardTest, TraceFieldsRecomputeExactly) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Instance inst = testing::acceptance_instance(seed);
        const LayerParams& p = inst.params;
        for (NodeId i = 0; i < inst.graph.num_nodes(); ++i) {
            const ForwardTrace t = forward_with_trace(p, inst.graph, inst.features, i);
            EXPECT_EQ(t.a2, p.theta_R * t.h_target);
            Vector sum = p.b;
            for (std::size_t k = 0; k < t.size(); ++k) {
                EXPECT_EQ(t.a3[k], p.theta_L * t.h_neighbor[k]);
                EXPECT_EQ(t.a4[k], t.a2 + t.a3[k]);
                for (Eigen::Index d = 0; d < t.a4[k].size(); ++d) {
                    const double x = t.a4[k][d];
                    EXPECT_EQ(t.a5[k][d], x > 0.0 ? x : p.negative_slope * x);
                }
                EXPECT_EQ(t.e[static_cast<Eigen::Index>(k)], p.a.dot(t.a5[k]));
                EXPECT_EQ(t.a9[k], t.alpha[static_cast<Eigen::Index>(k)] * t.a3[k]);
                sum += t.a9[k];
            }
            EXPECT_EQ(t.alpha, softmax_neighbors(t.e));
            EXPECT_EQ(t.h_out, sum);
            EXPECT_EQ(update_node(p, t), t.h_out);
        }
    }
}

TEST(ForwardTest, OutputInConvexHullOfMessages) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Instance inst = testing::acceptance_instance(seed);
        for (NodeId i = 0; i < inst.graph.num_nodes(); ++i) {
            const ForwardTrace t = forward_with_trace(inst.params, inst.graph, inst.features, i);
            if (t.size() == 0) {
                continue;
            }
            EXPECT_NEAR(t.alpha.sum(), 1.0, 1e-12);
            const Vector centered = t.h_out - inst.params.b;
            for (Eigen::Index d = 0; d < centered.size(); ++d) {
                double lo = t.a3[0][d], hi = t.a3[0][d];
                for (const auto& m : t.a3) {
                    lo = std::min(lo, m[d]);
                    hi = std::max(hi, m[d]);
                }
                EXPECT_GE(centered[d], lo - 1e-12);
                EXPECT_LE(centered[d], hi + 1e-12);
            }
        }
    }
}

TEST(ForwardTest, Deterministic) {
    const Instance inst = testing::acceptance_instance(17);
    const ForwardTrace a = forward_with_trace(inst.params, inst.graph, inst.features, 1);
    const ForwardTrace b = forward_with_trace(inst.params, inst.graph, inst.features, 1);
    EXPECT_EQ(a.e, b.e);
    EXPECT_EQ(a.alpha, b.alpha);
    EXPECT_EQ(a.h_out, b.h_out);
}

TEST(ForwardTest, RejectsDimensionMismatch) {
    const Instance inst = testing::dense_instance(3, 2, 3, 1);
    const FeatureMatrix wrong(3, {Vector::Zero(3), Vector::Zero(3), Vector::Zero(3)});
    EXPECT_THROW(forward_with_trace(inst.params, inst.graph, wrong, 0), InputError);
    EXPECT_THROW(forward_with_trace(inst.params, inst.graph, inst.features, 3), InputError);
}

TEST(LayerParamsTest, Validation) {
    LayerParams p = LayerParams::zeros(2, 3);
    EXPECT_NO_THROW(p.validate());
    p.negative_slope = 0.0;
    EXPECT_THROW(p.validate(), InputError);
    p.negative_slope = 1.5;
    EXPECT_THROW(p.validate(), InputError);
    p = LayerParams::zeros(2, 3);
    p.theta_L = Matrix::Zero(2, 3);
    EXPECT_THROW(p.validate(), InputError);
    p = LayerParams::zeros(2, 3);
    p.b = Vector::Zero(3);
    EXPECT_THROW(p.validate(), InputError);
    p = LayerParams::zeros(2, 3);
    p.a[0] = std::numeric_limits<double>::infinity();
    EXPECT_THROW(p.validate(), InputError);
}

}  // namespace
}  // namespace gatgrad
