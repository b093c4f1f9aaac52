#include "gatgrad/generate.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace gatgrad {

namespace {

Matrix normal_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = normal(rng);
        }
    }
    return m;
}

Vector normal_vector(std::mt19937_64& rng, Eigen::Index size) {
    return normal_matrix(rng, size, 1).col(0);
}

}  // namespace

Instance generate_instance(const GenConfig& config) {
    const std::size_t n = config.num_nodes;
    if (n == 0 || config.out_dim == 0) {
        throw InputError("num_nodes and out_dim must be positive");
    }
    if (config.min_degree > n) {
        throw InputError("min_degree " + std::to_string(config.min_degree) + " exceeds node count " +
                         std::to_string(n));
    }
    std::mt19937_64 rng(config.seed);

    std::vector<Vector> rows;
    rows.reserve(n);
    for (std::size_t q = 0; q < n; ++q) {
        rows.push_back(normal_vector(rng, static_cast<Eigen::Index>(config.feature_dim)));
    }

    std::vector<Edge> edges;
    const std::size_t max_degree = std::max(config.min_degree, n - 1);
    for (NodeId target = 0; target < n; ++target) {
        std::vector<NodeId> others;
        for (NodeId q = 0; q < n; ++q) {
            if (q != target) {
                others.push_back(q);
            }
        }
        std::shuffle(others.begin(), others.end(), rng);
        others.push_back(target);
        std::uniform_int_distribution<std::size_t> degree_dist(config.min_degree, max_degree);
        const std::size_t degree = degree_dist(rng);
        for (std::size_t k = 0; k < degree; ++k) {
            edges.push_back({target, others[k]});
        }
    }

    const auto d = static_cast<Eigen::Index>(config.out_dim);
    const auto cols = static_cast<Eigen::Index>(config.feature_dim + 1);
    LayerParams params;
    params.theta_R = normal_matrix(rng, d, cols);
    params.theta_L = normal_matrix(rng, d, cols);
    params.a = normal_vector(rng, d);
    params.b = normal_vector(rng, d);
    params.negative_slope = config.negative_slope;
    params.validate();

    return Instance{Graph(n, std::move(edges)), FeatureMatrix(config.feature_dim, std::move(rows)),
                    std::move(params)};
}

}  // namespace gatgrad
