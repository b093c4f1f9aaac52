#include "gatgrad/layer.hpp"

#include <cmath>
#include <string>

namespace gatgrad {

namespace {

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
        throw InputError(std::string(name) + " is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
}

}  // namespace

void LayerParams::validate() const {
    const Eigen::Index d = a.size();
    if (d == 0) {
        throw InputError("output dimension D must be positive");
    }
    if (theta_R.cols() < 1) {
        throw InputError("theta_R needs at least the bias column");
    }
    require_shape(theta_R, d, theta_R.cols(), "theta_R");
    require_shape(theta_L, d, theta_R.cols(), "theta_L");
    if (b.size() != d) {
        throw InputError("b has length " + std::to_string(b.size()) + ", expected " + std::to_string(d));
    }
    if (!(negative_slope > 0.0 && negative_slope <= 1.0)) {
        throw InputError("negative_slope must lie in (0, 1]");
    }
    if (!theta_R.allFinite() || !theta_L.allFinite() || !a.allFinite() || !b.allFinite()) {
        throw InputError("layer parameters contain non-finite entries");
    }
}

LayerParams LayerParams::zeros(std::size_t out_dim, std::size_t feature_dim, double negative_slope) {
    const auto d = static_cast<Eigen::Index>(out_dim);
    const auto cols = static_cast<Eigen::Index>(feature_dim + 1);
    return LayerParams{Matrix::Zero(d, cols), Matrix::Zero(d, cols), Vector::Zero(d), Vector::Zero(d),
                       negative_slope};
}

double leaky_relu(double x, double negative_slope) {
    return x > 0.0 ? x : negative_slope * x;
}

Vector leaky_relu(const Vector& x, double negative_slope) {
    return x.unaryExpr([negative_slope](double v) { return leaky_relu(v, negative_slope); });
}

double score(const LayerParams& params, const AugmentedFeature& h_target,
             const AugmentedFeature& h_source) {
    const auto cols = params.theta_R.cols();
    if (static_cast<Eigen::Index>(h_target.size()) != cols ||
        static_cast<Eigen::Index>(h_source.size()) != cols) {
        throw InputError("augmented feature length does not match theta columns");
    }
    if (params.theta_L.rows() != params.a.size() || params.theta_R.rows() != params.a.size()) {
        throw InputError("theta rows do not match the length of a");
    }
    const Vector pre = params.theta_R * h_target.values() + params.theta_L * h_source.values();
    return params.a.dot(leaky_relu(pre, params.negative_slope));
}

Vector softmax_neighbors(const Vector& scores) {
    if (scores.size() == 0) {
        return Vector();
    }
    if (!scores.allFinite()) {
        throw InputError("attention scores must be finite");
    }
    const Vector shifted = (scores.array() - scores.maxCoeff()).exp().matrix();
    return shifted / shifted.sum();
}

Vector update_node(const LayerParams& params, const ForwardTrace& trace) {
    const std::size_t n = trace.size();
    if (static_cast<std::size_t>(trace.alpha.size()) != n || trace.a3.size() != n) {
        throw InputError("trace is missing alpha or a3 for some neighbor");
    }
    Vector out = params.b;
    for (std::size_t k = 0; k < n; ++k) {
        if (trace.a3[k].size() != out.size()) {
            throw InputError("a3 length does not match D");
        }
        out += trace.alpha[static_cast<Eigen::Index>(k)] * trace.a3[k];
    }
    return out;
}

ForwardTrace forward_with_trace(const LayerParams& params, const Graph& graph,
                                const FeatureMatrix& features, NodeId target) {
    params.validate();
    if (features.dim() != params.feature_dim()) {
        throw InputError("feature dimension " + std::to_string(features.dim()) +
                         " does not match parameter H = " + std::to_string(params.feature_dim()));
    }
    if (features.num_rows() != graph.num_nodes()) {
        throw InputError("feature matrix has " + std::to_string(features.num_rows()) +
                         " rows for a graph of " + std::to_string(graph.num_nodes()) + " nodes");
    }
    const auto nbrs = graph.neighbors(target);
    const std::size_t n = nbrs.size();

    ForwardTrace t;
    t.target = target;
    t.neighbors.assign(nbrs.begin(), nbrs.end());
    t.h_target = augment(features.row(target)).values();
    t.a2 = params.theta_R * t.h_target;
    t.e.resize(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        t.h_neighbor.push_back(augment(features.row(nbrs[k])).values());
        t.a3.push_back(params.theta_L * t.h_neighbor.back());
        t.a4.push_back(t.a2 + t.a3.back());
        t.a5.push_back(leaky_relu(t.a4.back(), params.negative_slope));
        t.e[static_cast<Eigen::Index>(k)] = params.a.dot(t.a5.back());
    }
    t.alpha = softmax_neighbors(t.e);
    for (std::size_t k = 0; k < n; ++k) {
        t.a9.push_back(t.alpha[static_cast<Eigen::Index>(k)] * t.a3[k]);
    }
    // h_out is exactly b plus the stored a9 terms.
    t.h_out = params.b;
    for (const auto& m : t.a9) {
        t.h_out += m;
    }
    return t;
}

}  // namespace gatgrad
