#include "gatgrad/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace gatgrad {

double attention_entropy(const Vector& alpha) {
    double h = 0.0;
    for (const double p : alpha) {
        if (p > 0.0) {
            h -= p * std::log(p);
        }
    }
    return std::max(h, 0.0);
}

std::vector<bool> dead_theta_R_rows(const ForwardTrace& trace, double negative_slope) {
    const auto slopes = slope_indicators(trace, negative_slope);
    const auto d = static_cast<std::size_t>(trace.a2.size());
    std::vector<bool> dead(d, true);
    for (std::size_t t = 0; t < d; ++t) {
        for (std::size_t k = 1; k < slopes.s.size(); ++k) {
            if (slopes.s[k][static_cast<Eigen::Index>(t)] != slopes.s[0][static_cast<Eigen::Index>(t)]) {
                dead[t] = false;
                break;
            }
        }
    }
    return dead;
}

NodePathology diagnose_node(const LayerParams& params, const Graph& graph, const FeatureMatrix& features,
                            NodeId target, const LossSpec& spec) {
    const ForwardTrace trace = forward_with_trace(params, graph, features, target);
    const UpstreamGradient upstream(loss(trace.h_out, spec).upstream);

    NodePathology out;
    out.target = target;
    out.num_neighbors = trace.size();
    out.single_neighbor = trace.size() <= 1;
    out.attention_entropy = attention_entropy(trace.alpha);
    out.dead_theta_R = dead_theta_R_rows(trace, params.negative_slope);
    const auto dead = static_cast<double>(std::count(out.dead_theta_R.begin(), out.dead_theta_R.end(), true));
    out.regime_uniformity = out.dead_theta_R.empty() ? 0.0 : dead / static_cast<double>(out.dead_theta_R.size());

    const GradCheckReport gap = compare(closed_form_gradients(trace, params, upstream),
                                        backward_chain(trace, params, upstream), 0.0);
    for (const auto& check : gap.params) {
        out.closed_form_gap = std::max(out.closed_form_gap, check.max_rel_err);
    }
    return out;
}

std::vector<NodeId> default_diagnosis_nodes(const Graph& graph) {
    std::vector<NodeId> nodes;
    for (NodeId i = 0; i < graph.num_nodes(); ++i) {
        if (!graph.neighbors(i).empty()) {
            nodes.push_back(i);
        }
    }
    return nodes;
}

PathologyReport diagnose(const LayerParams& params, const Graph& graph, const FeatureMatrix& features,
                         std::span<const NodeId> nodes, const LossSpec& spec) {
    PathologyReport report;
    report.nodes.reserve(nodes.size());
    for (const NodeId i : nodes) {
        report.nodes.push_back(diagnose_node(params, graph, features, i, spec));
    }
    return report;
}

}  // namespace gatgrad
