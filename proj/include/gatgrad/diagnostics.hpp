#ifndef GATGRAD_DIAGNOSTICS_HPP
#define GATGRAD_DIAGNOSTICS_HPP

#include <span>
#include <vector>

#include "gatgrad/fd_oracle.hpp"

namespace gatgrad {

/// Structural gradient pathologies of one target node.
struct NodePathology {
    NodeId target = 0;
    std::size_t num_neighbors = 0;
    bool single_neighbor = false;       // N <= 1: attention is constant
    double attention_entropy = 0.0;     // natural log, in [0, ln N]
    std::vector<bool> dead_theta_R;     // per output row t: all neighbors share s[t]
    double regime_uniformity = 0.0;     // fraction of dead rows
    double closed_form_gap = 0.0;       // closed forms vs backward_chain, compare() metric
};

struct PathologyReport {
    std::vector<NodePathology> nodes;
};

/// -sum alpha ln alpha, with 0 ln 0 = 0.
double attention_entropy(const Vector& alpha);

/// Rows t in which every neighbor sits on the same LeakyReLU branch. The
/// Theta_R gradient of such a row vanishes identically.
std::vector<bool> dead_theta_R_rows(const ForwardTrace& trace, double negative_slope);

NodePathology diagnose_node(const LayerParams& params, const Graph& graph, const FeatureMatrix& features,
                            NodeId target, const LossSpec& spec);

/// Nodes with at least one neighbor.
std::vector<NodeId> default_diagnosis_nodes(const Graph& graph);

PathologyReport diagnose(const LayerParams& params, const Graph& graph, const FeatureMatrix& features,
                         std::span<const NodeId> nodes, const LossSpec& spec);

}  // namespace gatgrad

#endif  // GATGRAD_DIAGNOSTICS_HPP
