#include "gatgrad/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gatgrad {

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges)
    : num_nodes_(num_nodes), edges_(std::move(edges)), neighbor_lists_(num_nodes) {
    if (num_nodes_ == 0) {
        throw InputError("graph must have at least one node");
    }
    for (const auto& e : edges_) {
        if (e.target >= num_nodes_ || e.source >= num_nodes_) {
            throw InputError("edge [" + std::to_string(e.target) + ", " + std::to_string(e.source) +
                             "] has an endpoint outside [0, " + std::to_string(num_nodes_) + ")");
        }
        auto& list = neighbor_lists_[e.target];
        if (std::find(list.begin(), list.end(), e.source) != list.end()) {
            throw InputError("duplicate edge [" + std::to_string(e.target) + ", " +
                             std::to_string(e.source) + "]");
        }
        list.push_back(e.source);
    }
}

std::span<const NodeId> Graph::neighbors(NodeId target) const {
    if (target >= num_nodes_) {
        throw InputError("node " + std::to_string(target) + " out of range (n = " +
                         std::to_string(num_nodes_) + ")");
    }
    return neighbor_lists_[target];
}

FeatureMatrix::FeatureMatrix(std::size_t dim, std::vector<Vector> rows)
    : dim_(dim), rows_(std::move(rows)) {
    for (std::size_t q = 0; q < rows_.size(); ++q) {
        if (static_cast<std::size_t>(rows_[q].size()) != dim_) {
            throw InputError("feature row " + std::to_string(q) + " has length " +
                             std::to_string(rows_[q].size()) + ", expected " + std::to_string(dim_));
        }
        if (!rows_[q].allFinite()) {
            throw InputError("feature row " + std::to_string(q) + " has a non-finite entry");
        }
    }
}

const Vector& FeatureMatrix::row(NodeId q) const {
    if (q >= rows_.size()) {
        throw InputError("feature row " + std::to_string(q) + " out of range");
    }
    return rows_[q];
}

AugmentedFeature augment(std::span<const double> h) {
    Vector out(static_cast<Eigen::Index>(h.size() + 1));
    out[0] = 1.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (!std::isfinite(h[k])) {
            throw InputError("feature entry " + std::to_string(k) + " is not finite");
        }
        out[static_cast<Eigen::Index>(k + 1)] = h[k];
    }
    return AugmentedFeature(std::move(out));
}

AugmentedFeature augment(const Vector& h) {
    return augment(std::span<const double>(h.data(), static_cast<std::size_t>(h.size())));
}

}  // namespace gatgrad
