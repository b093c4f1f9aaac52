#ifndef GATGRAD_GENERATE_HPP
#define GATGRAD_GENERATE_HPP

#include <cstdint>

#include "gatgrad/graph.hpp"
#include "gatgrad/layer.hpp"

namespace gatgrad {

struct GenConfig {
    std::size_t num_nodes = 5;
    std::size_t feature_dim = 3;
    std::size_t out_dim = 4;
    std::size_t min_degree = 2;
    std::uint64_t seed = 0;
    double negative_slope = kDefaultNegativeSlope;
};

struct Instance {
    Graph graph;
    FeatureMatrix features;
    LayerParams params;
};

/// Random instance: features and parameters are standard normal, every node
/// gets between min_degree and max(min_degree, n-1) distinct neighbors.
/// Neighbors are drawn from the other nodes; a self-loop is added only when
/// min_degree == n. Fully determined by the config.
Instance generate_instance(const GenConfig& config);

}  // namespace gatgrad

#endif  // GATGRAD_GENERATE_HPP
