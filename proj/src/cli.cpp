#include "gatgrad/cli.hpp"

#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "gatgrad/diagnostics.hpp"
#include "gatgrad/generate.hpp"
#include "gatgrad/io.hpp"

namespace gatgrad::cli {

namespace {

struct Inputs {
    GraphData data;
    LayerParams params;
};

Inputs load_inputs(const RunConfig& config) {
    if (config.graph_path.empty() || config.params_path.empty()) {
        throw InputError("--graph and --params are required");
    }
    GraphData data = graph_from_json(read_json_file(config.graph_path));
    LayerParams params = params_from_json(read_json_file(config.params_path));
    if (params.feature_dim() != data.features.dim()) {
        throw InputError("params H = " + std::to_string(params.feature_dim()) +
                         " does not match graph feature_dim = " + std::to_string(data.features.dim()));
    }
    return Inputs{std::move(data), std::move(params)};
}

std::vector<NodeId> select_nodes(const RunConfig& config, const Graph& graph, bool skip_isolated) {
    if (config.node) {
        graph.neighbors(*config.node);  // range check
        return {*config.node};
    }
    if (skip_isolated && !config.all_nodes) {
        return default_diagnosis_nodes(graph);
    }
    std::vector<NodeId> nodes(graph.num_nodes());
    for (NodeId i = 0; i < nodes.size(); ++i) {
        nodes[i] = i;
    }
    return nodes;
}

void require_out(const RunConfig& config) {
    if (config.out_path.empty()) {
        throw InputError("--out is required");
    }
}

// Upstream gradients per selected node. Random mode draws D standard normals
// per node, in node order, from one generator seeded with config.seed.
class UpstreamSource {
public:
    UpstreamSource(const RunConfig& config, std::size_t out_dim) : config_(config), out_dim_(out_dim), rng_(config.seed) {
        if (config.upstream_mode == UpstreamMode::kFile) {
            const Json j = read_json_file(config.upstream_file);
            file_vector_ = vector_from_json(j.is_object() && j.contains("upstream") ? j.at("upstream") : j,
                                            "upstream file");
            if (static_cast<std::size_t>(file_vector_.size()) != out_dim) {
                throw InputError("upstream file has length " + std::to_string(file_vector_.size()) +
                                 ", expected D = " + std::to_string(out_dim));
            }
        }
    }

    Vector next() {
        switch (config_.upstream_mode) {
            case UpstreamMode::kUniform:
                return Vector::Ones(static_cast<Eigen::Index>(out_dim_));
            case UpstreamMode::kFile:
                return file_vector_;
            case UpstreamMode::kRandom:
                break;
        }
        std::normal_distribution<double> normal(0.0, 1.0);
        Vector g(static_cast<Eigen::Index>(out_dim_));
        for (auto& v : g) {
            v = normal(rng_);
        }
        return g;
    }

private:
    const RunConfig& config_;
    std::size_t out_dim_;
    std::mt19937_64 rng_;
    Vector file_vector_;
};

}  // namespace

void parse_upstream(const std::string& text, RunConfig& config) {
    if (text == "uniform") {
        config.upstream_mode = UpstreamMode::kUniform;
    } else if (text == "random") {
        config.upstream_mode = UpstreamMode::kRandom;
    } else if (text.rfind("file:", 0) == 0 && text.size() > 5) {
        config.upstream_mode = UpstreamMode::kFile;
        config.upstream_file = text.substr(5);
    } else {
        throw InputError("--upstream must be uniform, random or file:PATH");
    }
}

std::string upstream_label(const RunConfig& config) {
    switch (config.upstream_mode) {
        case UpstreamMode::kUniform: return "uniform";
        case UpstreamMode::kRandom: return "random";
        case UpstreamMode::kFile: return "file:" + config.upstream_file;
    }
    return "uniform";
}

int cmd_gen(const RunConfig& config) {
    if (config.graph_path.empty() || config.params_path.empty()) {
        throw InputError("gen needs --graph and --params output paths");
    }
    if (config.num_nodes == 0 || config.out_dim == 0) {
        throw InputError("--nodes and --out-dim must be positive");
    }
    GenConfig gen;
    gen.num_nodes = config.num_nodes;
    gen.feature_dim = config.feature_dim;
    gen.out_dim = config.out_dim;
    gen.min_degree = config.min_degree;
    gen.seed = config.seed;
    gen.negative_slope = config.negative_slope;
    const Instance inst = generate_instance(gen);
    write_json_file(config.graph_path, graph_to_json(inst.graph, inst.features));
    write_json_file(config.params_path, params_to_json(inst.params));

    const Inputs reloaded = load_inputs(config);
    for (NodeId i = 0; i < reloaded.data.graph.num_nodes(); ++i) {
        const ForwardTrace trace = forward_with_trace(reloaded.params, reloaded.data.graph, reloaded.data.features, i);
        if (!trace.h_out.allFinite() || trace.size() < config.min_degree) {
            throw std::runtime_error("generated instance failed its self-check at node " + std::to_string(i));
        }
    }
    return kPass;
}

int cmd_forward(const RunConfig& config) {
    require_out(config);
    const Inputs in = load_inputs(config);
    Json nodes = Json::array();
    for (const NodeId i : select_nodes(config, in.data.graph, false)) {
        const ForwardTrace trace = forward_with_trace(in.params, in.data.graph, in.data.features, i);
        Json node;
        node["target_node"] = i;
        node["neighbors"] = trace.neighbors;
        node["scores"] = vector_to_json(trace.e);
        node["alpha"] = vector_to_json(trace.alpha);
        node["h_out"] = vector_to_json(trace.h_out);
        nodes.push_back(std::move(node));
    }
    write_json_file(config.out_path, Json{{"nodes", std::move(nodes)}});
    return kPass;
}

int cmd_gradcheck(const RunConfig& config) {
    require_out(config);
    const Inputs in = load_inputs(config);
    FdConfig fd_config;
    fd_config.step = config.step;
    fd_config.tolerance = config.tolerance;
    fd_config.kink_guard = config.kink_guard;
    fd_config.validate();

    UpstreamSource upstreams(config, in.params.out_dim());
    bool all_pass = true;
    Json worst;
    double worst_err = -1.0;
    Json nodes = Json::array();
    for (const NodeId i : select_nodes(config, in.data.graph, false)) {
        const ForwardTrace trace = forward_with_trace(in.params, in.data.graph, in.data.features, i);
        const UpstreamGradient upstream(upstreams.next());
        const FdGradient numeric =
            fd_gradient(in.params, in.data.graph, in.data.features, i, LossSpec::dot(upstream.g()), fd_config);
        const GradientSet chain = backward_chain(trace, in.params, upstream);
        const GradCheckReport chain_report = compare(chain, numeric, fd_config);
        const GradCheckReport closed_report =
            compare(closed_form_gradients(trace, in.params, upstream), numeric, fd_config);
        const bool closed_enforced = upstream.is_constant();
        const bool node_pass = chain_report.pass && (!closed_enforced || closed_report.pass);
        all_pass = all_pass && node_pass;

        auto track_worst = [&](const GradCheckReport& report, const char* route) {
            if (const auto w = report.worst(); w && report[w->first].max_rel_err > worst_err) {
                worst_err = report[w->first].max_rel_err;
                worst = Json{{"target_node", i},          {"route", route},
                             {"param", block_name(w->first)}, {"index", w->second},
                             {"max_rel_err", worst_err}};
            }
        };
        track_worst(chain_report, "backward_chain");
        if (closed_enforced) {
            track_worst(closed_report, "closed_form");
        }

        Json node;
        node["target_node"] = i;
        node["N"] = trace.size();
        node["upstream"] = vector_to_json(upstream.g());
        node["pass"] = node_pass;
        const Json chain_json = check_report_to_json(chain_report);
        for (const auto& [key, value] : chain_json.items()) {
            node[key] = value;
        }
        Json closed = check_report_to_json(closed_report);
        closed["enforced"] = closed_enforced;
        node["closed_form"] = std::move(closed);
        node["gradients"] = gradient_set_to_json(chain, i, trace.size(), upstream_label(config));
        nodes.push_back(std::move(node));
    }

    Json report;
    report["pass"] = all_pass;
    report["step"] = fd_config.step;
    report["tolerance"] = fd_config.tolerance;
    report["kink_guard"] = fd_config.kink_guard;
    report["seed"] = config.seed;
    report["upstream_mode"] = upstream_label(config);
    report["worst"] = worst.is_null() ? Json::object() : worst;
    report["nodes"] = std::move(nodes);
    write_json_file(config.out_path, report);
    return all_pass ? kPass : kCheckFailed;
}

int cmd_diagnose(const RunConfig& config) {
    require_out(config);
    const Inputs in = load_inputs(config);
    UpstreamSource upstreams(config, in.params.out_dim());
    PathologyReport report;
    for (const NodeId i : select_nodes(config, in.data.graph, true)) {
        report.nodes.push_back(
            diagnose_node(in.params, in.data.graph, in.data.features, i, LossSpec::dot(upstreams.next())));
    }
    write_json_file(config.out_path, pathology_report_to_json(report));
    return kPass;
}

int run(const RunConfig& config) {
    try {
        switch (config.command) {
            case Command::kGen: return cmd_gen(config);
            case Command::kForward: return cmd_forward(config);
            case Command::kGradcheck: return cmd_gradcheck(config);
            case Command::kDiagnose: return cmd_diagnose(config);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }
    return kUsageError;
}

int main(int argc, char** argv) {
    CLI::App app{"GATv2 forward pass, analytic gradients and finite-difference checks"};
    app.require_subcommand(1);
    RunConfig config;
    std::string upstream = "uniform";
    std::int64_t node = -1;

    auto add_io = [&](CLI::App* sub, bool with_out) {
        sub->add_option("--graph", config.graph_path, "Graph JSON file")->required();
        sub->add_option("--params", config.params_path, "Params JSON file")->required();
        if (with_out) {
            sub->add_option("--out", config.out_path, "Output JSON file")->required();
        }
    };
    auto add_nodes = [&](CLI::App* sub) {
        auto* single = sub->add_option("--node", node, "Target node id")->check(CLI::NonNegativeNumber);
        sub->add_flag("--all-nodes", config.all_nodes, "Use every node")->excludes(single);
    };
    auto add_upstream = [&](CLI::App* sub) {
        sub->add_option("--upstream", upstream, "uniform | random | file:PATH");
        sub->add_option("--seed", config.seed, "Seed for random upstream gradients");
    };

    auto* gen = app.add_subcommand("gen", "Generate a random graph and params");
    add_io(gen, false);
    gen->add_option("--seed", config.seed, "RNG seed");
    gen->add_option("--nodes", config.num_nodes, "Number of nodes");
    gen->add_option("--feature-dim", config.feature_dim, "Feature dimension H");
    gen->add_option("--out-dim", config.out_dim, "Output dimension D");
    gen->add_option("--min-degree", config.min_degree, "Minimum neighbors per node");
    gen->add_option("--negative-slope", config.negative_slope, "LeakyReLU negative slope");

    auto* forward = app.add_subcommand("forward", "Evaluate h' and attention weights");
    add_io(forward, true);
    add_nodes(forward);

    auto* gradcheck = app.add_subcommand("gradcheck", "Check analytic gradients against finite differences");
    add_io(gradcheck, true);
    add_nodes(gradcheck);
    add_upstream(gradcheck);
    gradcheck->add_option("--step", config.step, "Finite-difference step");
    gradcheck->add_option("--tol", config.tolerance, "Relative tolerance");
    gradcheck->add_option("--kink-guard", config.kink_guard, "Distance to a LeakyReLU kink that flags an entry");

    auto* diag = app.add_subcommand("diagnose", "Report dead rows, attention entropy and closed-form gaps");
    add_io(diag, true);
    add_nodes(diag);
    add_upstream(diag);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsageError;
    }

    if (gen->parsed()) {
        config.command = Command::kGen;
    } else if (forward->parsed()) {
        config.command = Command::kForward;
    } else if (gradcheck->parsed()) {
        config.command = Command::kGradcheck;
    } else {
        config.command = Command::kDiagnose;
    }
    if (node >= 0) {
        config.node = static_cast<NodeId>(node);
    }
    try {
        parse_upstream(upstream, config);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }
    return run(config);
}

}  // namespace gatgrad::cli
