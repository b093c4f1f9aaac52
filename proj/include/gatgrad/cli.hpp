#ifndef GATGRAD_CLI_HPP
#define GATGRAD_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "gatgrad/layer.hpp"

namespace gatgrad::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kUsageError = 2 };

enum class Command { kGen, kForward, kGradcheck, kDiagnose };
enum class UpstreamMode { kUniform, kRandom, kFile };

struct RunConfig {
    Command command = Command::kGen;
    std::string graph_path;
    std::string params_path;
    std::string out_path;
    std::optional<NodeId> node;  // unset: command default node set
    bool all_nodes = false;
    std::uint64_t seed = 0;
    UpstreamMode upstream_mode = UpstreamMode::kUniform;
    std::string upstream_file;
    double step = 1e-5;
    double tolerance = 1e-6;
    double kink_guard = 1e-4;
    // gen only
    std::size_t num_nodes = 5;
    std::size_t feature_dim = 3;
    std::size_t out_dim = 4;
    std::size_t min_degree = 2;
    double negative_slope = kDefaultNegativeSlope;
};

/// Parses "uniform", "random" or "file:PATH". Throws InputError otherwise.
void parse_upstream(const std::string& text, RunConfig& config);
std::string upstream_label(const RunConfig& config);

/// Writes the graph and params files, then reloads them and runs a forward
/// pass on every node.
int cmd_gen(const RunConfig& config);
/// Per-node neighbor list, attention weights and h'.
int cmd_forward(const RunConfig& config);
/// backward_chain and the closed forms against central differences. The
/// closed forms only count toward the verdict when the upstream gradient is
/// constant. The report is written before returning.
int cmd_gradcheck(const RunConfig& config);
int cmd_diagnose(const RunConfig& config);

/// Dispatches to the commands; maps input errors to kUsageError.
int run(const RunConfig& config);

/// Full command-line entry point.
int main(int argc, char** argv);

}  // namespace gatgrad::cli

#endif  // GATGRAD_CLI_HPP
