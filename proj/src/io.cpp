#include "gatgrad/io.hpp"

#include <fstream>
#include <sstream>

namespace gatgrad {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw InputError(std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

std::size_t size_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw InputError(std::string("field \"") + key + "\" must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

double number(const Json& v, const char* what) {
    if (!v.is_number()) {
        throw InputError(std::string(what) + " must contain only numbers");
    }
    return v.get<double>();
}

Matrix matrix_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.empty()) {
        throw InputError(std::string(what) + " must be a non-empty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const Json& first = j.front();
    if (!first.is_array()) {
        throw InputError(std::string(what) + " rows must be arrays");
    }
    const auto cols = static_cast<Eigen::Index>(first.size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Json& row = j.at(static_cast<std::size_t>(r));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw InputError(std::string(what) + " rows must all have length " + std::to_string(cols));
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = number(row.at(static_cast<std::size_t>(c)), what);
        }
    }
    return m;
}

Json matrix_to_json(const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (const double x : v) {
        out.push_back(x);
    }
    return out;
}

Vector vector_from_json(const Json& j, const char* what) {
    if (!j.is_array()) {
        throw InputError(std::string(what) + " must be an array");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        v[static_cast<Eigen::Index>(k)] = number(j.at(k), what);
    }
    return v;
}

GraphData graph_from_json(const Json& j) {
    const std::size_t n = size_field(j, "num_nodes");
    const std::size_t dim = size_field(j, "feature_dim");
    const Json& feats = field(j, "features");
    if (!feats.is_array() || feats.size() != n) {
        throw InputError("\"features\" must hold one row per node");
    }
    std::vector<Vector> rows;
    rows.reserve(n);
    for (const Json& row : feats) {
        rows.push_back(vector_from_json(row, "feature row"));
    }
    const Json& edge_list = field(j, "edges");
    if (!edge_list.is_array()) {
        throw InputError("\"edges\" must be an array");
    }
    std::vector<Edge> edges;
    edges.reserve(edge_list.size());
    for (const Json& e : edge_list) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
            e[0].get<long long>() < 0 || e[1].get<long long>() < 0) {
            throw InputError("each edge must be a pair of non-negative integers");
        }
        edges.push_back({e[0].get<NodeId>(), e[1].get<NodeId>()});
    }
    return GraphData{Graph(n, std::move(edges)), FeatureMatrix(dim, std::move(rows))};
}

Json graph_to_json(const Graph& graph, const FeatureMatrix& features) {
    Json out;
    out["num_nodes"] = graph.num_nodes();
    out["feature_dim"] = features.dim();
    Json feats = Json::array();
    for (NodeId q = 0; q < features.num_rows(); ++q) {
        feats.push_back(vector_to_json(features.row(q)));
    }
    out["features"] = std::move(feats);
    Json edges = Json::array();
    for (const Edge& e : graph.edges()) {
        edges.push_back(Json::array({e.target, e.source}));
    }
    out["edges"] = std::move(edges);
    return out;
}

LayerParams params_from_json(const Json& j) {
    const std::size_t d = size_field(j, "D");
    const std::size_t h = size_field(j, "H");
    LayerParams p;
    p.theta_R = matrix_from_json(field(j, "theta_R"), "theta_R");
    p.theta_L = matrix_from_json(field(j, "theta_L"), "theta_L");
    p.a = vector_from_json(field(j, "a"), "a");
    p.b = vector_from_json(field(j, "b"), "b");
    p.negative_slope = j.contains("negative_slope") ? number(j.at("negative_slope"), "negative_slope")
                                                    : kDefaultNegativeSlope;
    if (static_cast<std::size_t>(p.a.size()) != d || static_cast<std::size_t>(p.theta_R.cols()) != h + 1) {
        throw InputError("params shapes disagree with D = " + std::to_string(d) + ", H = " + std::to_string(h));
    }
    p.validate();
    return p;
}

Json params_to_json(const LayerParams& params) {
    Json out;
    out["D"] = params.out_dim();
    out["H"] = params.feature_dim();
    out["negative_slope"] = params.negative_slope;
    out["theta_R"] = matrix_to_json(params.theta_R);
    out["theta_L"] = matrix_to_json(params.theta_L);
    out["a"] = vector_to_json(params.a);
    out["b"] = vector_to_json(params.b);
    return out;
}

Json gradient_set_to_json(const GradientSet& grads, NodeId target, std::size_t num_neighbors,
                          const std::string& upstream_mode) {
    Json out;
    out["theta_R"] = matrix_to_json(grads.d_theta_R);
    out["theta_L"] = matrix_to_json(grads.d_theta_L);
    out["a"] = vector_to_json(grads.d_a);
    out["b"] = vector_to_json(grads.d_b);
    out["meta"] = Json{{"target_node", target}, {"N", num_neighbors}, {"upstream_mode", upstream_mode}};
    return out;
}

Json check_report_to_json(const GradCheckReport& report) {
    Json out;
    for (const ParamCheck& check : report.params) {
        Json entry;
        entry["max_rel_err"] = check.max_rel_err;
        entry["pass"] = check.pass;
        entry["kink_flagged"] = check.kink_flagged;
        if (check.worst_index) {
            entry["worst_index"] = *check.worst_index;
        }
        out[check.name] = std::move(entry);
    }
    return out;
}

Json pathology_to_json(const NodePathology& node) {
    Json out;
    out["target_node"] = node.target;
    out["N"] = node.num_neighbors;
    out["single_neighbor"] = node.single_neighbor;
    out["attention_entropy"] = node.attention_entropy;
    out["dead_theta_R"] = node.dead_theta_R;
    out["regime_uniformity"] = node.regime_uniformity;
    out["closed_form_gap"] = node.closed_form_gap;
    return out;
}

Json pathology_report_to_json(const PathologyReport& report) {
    Json nodes = Json::array();
    for (const auto& node : report.nodes) {
        nodes.push_back(pathology_to_json(node));
    }
    return Json{{"nodes", std::move(nodes)}};
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

}  // namespace gatgrad
