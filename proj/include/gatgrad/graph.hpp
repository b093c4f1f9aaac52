#ifndef GATGRAD_GRAPH_HPP
#define GATGRAD_GRAPH_HPP

#include <span>
#include <utility>
#include <vector>

#include "gatgrad/types.hpp"

namespace gatgrad {

/// An edge (target, source): `source` sends a message to `target`.
struct Edge {
    NodeId target;
    NodeId source;
};

/// Directed graph stored as per-target neighbor lists.
///
/// The neighbor list of node i keeps the order in which edges (i, j) were
/// supplied. Gradient code indexes neighbors positionally, so this order is
/// part of the contract. Self-loops are only present if listed explicitly.
/// Duplicate edges are rejected.
class Graph {
public:
    Graph(std::size_t num_nodes, std::vector<Edge> edges);

    std::size_t num_nodes() const { return num_nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }

    /// Sources of messages into `target`, in edge order. Throws InputError if
    /// `target` is out of range.
    std::span<const NodeId> neighbors(NodeId target) const;

private:
    std::size_t num_nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<NodeId>> neighbor_lists_;
};

/// Node features h_q, one row per node.
class FeatureMatrix {
public:
    FeatureMatrix(std::size_t dim, std::vector<Vector> rows);

    std::size_t dim() const { return dim_; }
    std::size_t num_rows() const { return rows_.size(); }
    const Vector& row(NodeId q) const;

private:
    std::size_t dim_;
    std::vector<Vector> rows_;
};

/// Feature vector with a leading constant 1, so that column 0 of a weight
/// matrix acts as an additive bias: augmented = [1, h^T]^T.
class AugmentedFeature {
public:
    const Vector& values() const { return values_; }
    std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
    double operator[](std::size_t k) const { return values_[static_cast<Eigen::Index>(k)]; }

private:
    friend AugmentedFeature augment(std::span<const double> h);
    explicit AugmentedFeature(Vector v) : values_(std::move(v)) {}
    Vector values_;
};

/// Prepends the constant 1. Throws InputError naming the first non-finite entry.
AugmentedFeature augment(std::span<const double> h);
AugmentedFeature augment(const Vector& h);

}  // namespace gatgrad

#endif  // GATGRAD_GRAPH_HPP
