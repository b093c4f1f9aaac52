#include "test_support.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

namespace gatgrad::testing {

TempDir::TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = info != nullptr ? std::string(info->test_suite_name()) + "." + info->name() : "gatgrad";
    path_ = std::filesystem::temp_directory_path() / ("gatgrad_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Instance dense_instance(std::size_t n, std::size_t feature_dim, std::size_t out_dim, std::uint64_t seed) {
    GenConfig config{n, feature_dim, out_dim, 0, seed, kDefaultNegativeSlope};
    Instance inst = generate_instance(config);
    std::vector<Edge> edges;
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = 0; j < n; ++j) {
            if (i != j) {
                edges.push_back({i, j});
            }
        }
    }
    return Instance{Graph(n, std::move(edges)), inst.features, inst.params};
}

Instance acceptance_instance(std::uint64_t seed) {
    std::mt19937_64 sizes(seed ^ 0x9e3779b97f4a7c15ULL);
    GenConfig config;
    config.num_nodes = std::uniform_int_distribution<std::size_t>(3, 8)(sizes);
    config.feature_dim = std::uniform_int_distribution<std::size_t>(1, 4)(sizes);
    config.out_dim = std::uniform_int_distribution<std::size_t>(1, 4)(sizes);
    config.min_degree = 0;
    config.seed = seed;
    config.negative_slope = 0.2;
    return generate_instance(config);
}

Vector normal_vector(std::size_t size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(static_cast<Eigen::Index>(size));
    for (auto& x : v) {
        x = normal(rng);
    }
    return v;
}

double max_abs_diff(const GradientSet& x, const GradientSet& y) {
    return std::max({(x.d_theta_R - y.d_theta_R).cwiseAbs().maxCoeff(),
                     (x.d_theta_L - y.d_theta_L).cwiseAbs().maxCoeff(), (x.d_a - y.d_a).cwiseAbs().maxCoeff(),
                     (x.d_b - y.d_b).cwiseAbs().maxCoeff()});
}

std::vector<ConvergenceSample> fd_error_ladder(const Instance& inst, NodeId target, const Vector& g,
                                               const std::vector<double>& steps) {
    const ForwardTrace trace = forward_with_trace(inst.params, inst.graph, inst.features, target);
    const GradientSet analytic = backward_chain(trace, inst.params, UpstreamGradient(g));
    const double loss_scale = std::max(1.0, std::abs(g.dot(trace.h_out)));

    std::vector<FdGradient> ladder;
    for (const double step : steps) {
        FdConfig config;
        config.step = step;
        config.kink_guard = 4.0 * steps.front();
        ladder.push_back(fd_gradient(inst.params, inst.graph, inst.features, target, LossSpec::dot(g), config));
    }
    std::vector<ConvergenceSample> out;
    for (const ParamBlock block : kAllBlocks) {
        for (std::size_t index = 0; index < block_size(inst.params, block); ++index) {
            ConvergenceSample sample{block, index, {}};
            bool smooth = true;
            for (const auto& fd : ladder) {
                const auto& flagged = fd.flagged(block);
                smooth = smooth && std::find(flagged.begin(), flagged.end(), index) == flagged.end();
                sample.errors.push_back(
                    std::abs(gradient_entry(fd.values, block, index) - gradient_entry(analytic, block, index)));
            }
            const double roundoff = std::numeric_limits<double>::epsilon() * loss_scale / steps.back();
            if (smooth && sample.errors.back() >= 100.0 * roundoff) {
                out.push_back(std::move(sample));
            }
        }
    }
    return out;
}

}  // namespace gatgrad::testing
