#ifndef GATGRAD_LAYER_HPP
#define GATGRAD_LAYER_HPP

#include <vector>

#include "gatgrad/graph.hpp"
#include "gatgrad/types.hpp"

namespace gatgrad {

inline constexpr double kDefaultNegativeSlope = 0.2;

/// Trainable parameters of a single-head GATv2 layer.
///
/// theta_R and theta_L are D x (H+1). Column 0 holds the bias part and
/// columns 1..H the weight part, matching augmented features [1, h^T]^T.
struct LayerParams {
    Matrix theta_R;
    Matrix theta_L;
    Vector a;
    Vector b;
    double negative_slope = kDefaultNegativeSlope;

    std::size_t out_dim() const { return static_cast<std::size_t>(a.size()); }
    std::size_t feature_dim() const { return static_cast<std::size_t>(theta_R.cols()) - 1; }

    /// Throws InputError unless shapes agree, 0 < slope <= 1 and all entries are finite.
    void validate() const;

    static LayerParams zeros(std::size_t out_dim, std::size_t feature_dim,
                             double negative_slope = kDefaultNegativeSlope);
};

/// Cached intermediates of the forward pass for one target node.
///
/// Per-neighbor vectors are indexed by position k in the neighbor list, not
/// by node id.
struct ForwardTrace {
    NodeId target = 0;
    std::vector<NodeId> neighbors;
    Vector h_target;                 // augmented feature of the target
    std::vector<Vector> h_neighbor;  // augmented features of the neighbors
    Vector a2;                       // theta_R * h_target, shared by all neighbors
    std::vector<Vector> a3;          // theta_L * h_neighbor[k]
    std::vector<Vector> a4;          // a2 + a3[k]
    std::vector<Vector> a5;          // LeakyReLU(a4[k])
    Vector e;                        // raw attention score a . a5[k]
    Vector alpha;                    // softmax over e
    std::vector<Vector> a9;          // alpha[k] * a3[k]
    Vector h_out;                    // b + sum_k a9[k]

    std::size_t size() const { return neighbors.size(); }
};

/// LeakyReLU; zero goes to the negative branch.
double leaky_relu(double x, double negative_slope);
Vector leaky_relu(const Vector& x, double negative_slope);

/// Attention score a^T LeakyReLU(theta_R h_i + theta_L h_j).
double score(const LayerParams& params, const AugmentedFeature& h_target,
             const AugmentedFeature& h_source);

/// Max-shifted softmax. Returns an empty vector for empty input; throws on
/// non-finite scores.
Vector softmax_neighbors(const Vector& scores);

/// h' = b + sum_k alpha[k] * a3[k]. Requires alpha and a3 to be populated.
Vector update_node(const LayerParams& params, const ForwardTrace& trace);

/// Runs the forward pass for `target` and keeps every intermediate.
ForwardTrace forward_with_trace(const LayerParams& params, const Graph& graph,
                                const FeatureMatrix& features, NodeId target);

}  // namespace gatgrad

#endif  // GATGRAD_LAYER_HPP
