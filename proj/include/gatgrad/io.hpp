#ifndef GATGRAD_IO_HPP
#define GATGRAD_IO_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gatgrad/diagnostics.hpp"
#include "gatgrad/fd_oracle.hpp"
#include "gatgrad/graph.hpp"
#include "gatgrad/layer.hpp"

namespace gatgrad {

using Json = nlohmann::ordered_json;

struct GraphData {
    Graph graph;
    FeatureMatrix features;
};

// Graph file: {"num_nodes", "feature_dim", "features": [[...]], "edges": [[i, j]]},
// where [i, j] puts j in the neighbor list of i.
GraphData graph_from_json(const Json& j);
Json graph_to_json(const Graph& graph, const FeatureMatrix& features);

// Params file: {"D", "H", "negative_slope", "theta_R", "theta_L", "a", "b"},
// matrices as row-major nested arrays with column 0 the bias column.
LayerParams params_from_json(const Json& j);
Json params_to_json(const LayerParams& params);

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const char* what);

/// Gradient set in the params layout plus {"meta": {target_node, N, upstream_mode}}.
Json gradient_set_to_json(const GradientSet& grads, NodeId target, std::size_t num_neighbors,
                          const std::string& upstream_mode);

/// {"theta_R": {"max_rel_err", "pass", "kink_flagged"}, ...} for the four blocks.
Json check_report_to_json(const GradCheckReport& report);

Json pathology_to_json(const NodePathology& node);
Json pathology_report_to_json(const PathologyReport& report);

/// Reads and parses a JSON file; parse and I/O failures become InputError.
Json read_json_file(const std::filesystem::path& path);
/// Writes `j` indented by two spaces plus a trailing newline. Throws
/// std::runtime_error if the file cannot be written.
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace gatgrad

#endif  // GATGRAD_IO_HPP
