#ifndef GATGRAD_FD_ORACLE_HPP
#define GATGRAD_FD_ORACLE_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gatgrad/analytic_grads.hpp"
#include "gatgrad/graph.hpp"
#include "gatgrad/layer.hpp"

namespace gatgrad {

enum class LossMode { kDot, kHalfSquaredError };

/// Scalar loss on the layer output: either g . h' or 0.5 |h' - y|^2.
struct LossSpec {
    LossMode mode = LossMode::kDot;
    Vector vector;  // g for kDot, y for kHalfSquaredError

    static LossSpec dot(Vector g) { return {LossMode::kDot, std::move(g)}; }
    static LossSpec uniform(std::size_t out_dim) { return dot(Vector::Ones(static_cast<Eigen::Index>(out_dim))); }
    static LossSpec half_squared_error(Vector y) { return {LossMode::kHalfSquaredError, std::move(y)}; }
};

struct LossValue {
    double value;
    Vector upstream;  // dL/dh'
};

LossValue loss(const Vector& h_out, const LossSpec& spec);

struct FdConfig {
    double step = 1e-5;
    double tolerance = 1e-6;
    double kink_guard = 1e-4;

    void validate() const;
};

/// The four parameter blocks, in report order.
enum class ParamBlock { kThetaR, kThetaL, kA, kB };
inline constexpr std::array<ParamBlock, 4> kAllBlocks = {ParamBlock::kThetaR, ParamBlock::kThetaL,
                                                         ParamBlock::kA, ParamBlock::kB};
std::string_view block_name(ParamBlock block);
std::size_t block_size(const LayerParams& params, ParamBlock block);
/// Entry `index` of a block; matrices are indexed row-major.
double& param_entry(LayerParams& params, ParamBlock block, std::size_t index);
double gradient_entry(const GradientSet& grads, ParamBlock block, std::size_t index);

/// Central-difference gradient plus the entries whose perturbation moved some
/// LeakyReLU input to within kink_guard of zero (or across it).
struct FdGradient {
    GradientSet values;
    std::array<std::vector<std::size_t>, 4> kink_flagged;  // indexed like kAllBlocks

    const std::vector<std::size_t>& flagged(ParamBlock block) const {
        return kink_flagged[static_cast<std::size_t>(block)];
    }
};

/// (L(theta + eps) - L(theta - eps)) / (2 eps) for every raw parameter entry,
/// bias columns included. Throws InputError if a perturbed loss is not finite.
FdGradient fd_gradient(const LayerParams& params, const Graph& graph, const FeatureMatrix& features,
                       NodeId target, const LossSpec& spec, const FdConfig& config);

inline constexpr double kRelativeErrorFloor = 1e-12;

/// |x - y| / max(|x|, |y|, floor).
double relative_error(double x, double y, double floor = kRelativeErrorFloor);

struct ParamCheck {
    std::string name;
    double max_rel_err = 0.0;
    bool pass = true;
    std::optional<std::size_t> worst_index;
    std::vector<std::size_t> kink_flagged;
};

struct GradCheckReport {
    std::array<ParamCheck, 4> params;  // indexed like kAllBlocks
    bool pass = true;

    const ParamCheck& operator[](ParamBlock block) const { return params[static_cast<std::size_t>(block)]; }
    /// Block and entry with the largest error over all blocks, if any entry was compared.
    std::optional<std::pair<ParamBlock, std::size_t>> worst() const;
};

/// Denominator floor used by compare(): the largest magnitude over both
/// gradient sets, and never below kRelativeErrorFloor. Entry errors are thus
/// measured relative to the scale of the whole gradient, which keeps
/// structurally zero entries (dead rows, N <= 1) comparable. Central
/// differences at step 1e-5 carry ~1e-11 absolute noise, so an entry-local
/// denominator cannot resolve them.
double comparison_floor(const GradientSet& lhs, const GradientSet& rhs);

/// Per-block max relative error of `analytic` against `numeric`; kink-flagged
/// entries are listed but excluded from the verdict.
GradCheckReport compare(const GradientSet& analytic, const FdGradient& numeric, const FdConfig& config);

/// Same metric between two analytic gradient sets (no kink exclusions).
GradCheckReport compare(const GradientSet& lhs, const GradientSet& rhs, double tolerance);

}  // namespace gatgrad

#endif  // GATGRAD_FD_ORACLE_HPP
