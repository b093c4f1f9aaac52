#include "gatgrad/fd_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace gatgrad {

namespace {

std::size_t block_pos(ParamBlock block) { return static_cast<std::size_t>(block); }

double& matrix_entry(Matrix& m, std::size_t index) {
    const auto cols = static_cast<std::size_t>(m.cols());
    return m(static_cast<Eigen::Index>(index / cols), static_cast<Eigen::Index>(index % cols));
}

bool near_kink(const ForwardTrace& base, const ForwardTrace& plus, const ForwardTrace& minus, double guard) {
    for (std::size_t k = 0; k < base.a4.size(); ++k) {
        for (Eigen::Index t = 0; t < base.a4[k].size(); ++t) {
            const double p = plus.a4[k][t];
            const double m = minus.a4[k][t];
            if (p == base.a4[k][t] && m == base.a4[k][t]) {
                continue;  // untouched by this perturbation
            }
            if (std::min(std::abs(p), std::abs(m)) < guard || (p > 0.0) != (m > 0.0)) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

LossValue loss(const Vector& h_out, const LossSpec& spec) {
    if (h_out.size() != spec.vector.size()) {
        throw InputError("loss vector has length " + std::to_string(spec.vector.size()) +
                         ", output has length " + std::to_string(h_out.size()));
    }
    switch (spec.mode) {
        case LossMode::kDot:
            return {spec.vector.dot(h_out), spec.vector};
        case LossMode::kHalfSquaredError: {
            Vector diff = h_out - spec.vector;
            return {0.5 * diff.squaredNorm(), diff};
        }
    }
    throw InputError("unknown loss mode");
}

void FdConfig::validate() const {
    if (!(step > 0.0 && step < 1.0)) {
        throw InputError("finite-difference step must lie in (0, 1)");
    }
    if (!(tolerance > 0.0)) {
        throw InputError("tolerance must be positive");
    }
    if (!(kink_guard >= 0.0)) {
        throw InputError("kink guard must be non-negative");
    }
}

std::string_view block_name(ParamBlock block) {
    switch (block) {
        case ParamBlock::kThetaR: return "theta_R";
        case ParamBlock::kThetaL: return "theta_L";
        case ParamBlock::kA: return "a";
        case ParamBlock::kB: return "b";
    }
    return "?";
}

std::size_t block_size(const LayerParams& params, ParamBlock block) {
    switch (block) {
        case ParamBlock::kThetaR: return static_cast<std::size_t>(params.theta_R.size());
        case ParamBlock::kThetaL: return static_cast<std::size_t>(params.theta_L.size());
        case ParamBlock::kA: return static_cast<std::size_t>(params.a.size());
        case ParamBlock::kB: return static_cast<std::size_t>(params.b.size());
    }
    return 0;
}

double& param_entry(LayerParams& params, ParamBlock block, std::size_t index) {
    if (index >= block_size(params, block)) {
        throw InputError("parameter index out of range");
    }
    switch (block) {
        case ParamBlock::kThetaR: return matrix_entry(params.theta_R, index);
        case ParamBlock::kThetaL: return matrix_entry(params.theta_L, index);
        case ParamBlock::kA: return params.a[static_cast<Eigen::Index>(index)];
        case ParamBlock::kB: break;
    }
    return params.b[static_cast<Eigen::Index>(index)];
}

double gradient_entry(const GradientSet& grads, ParamBlock block, std::size_t index) {
    auto from_matrix = [index](const Matrix& m) {
        const auto cols = static_cast<std::size_t>(m.cols());
        return m(static_cast<Eigen::Index>(index / cols), static_cast<Eigen::Index>(index % cols));
    };
    switch (block) {
        case ParamBlock::kThetaR: return from_matrix(grads.d_theta_R);
        case ParamBlock::kThetaL: return from_matrix(grads.d_theta_L);
        case ParamBlock::kA: return grads.d_a[static_cast<Eigen::Index>(index)];
        case ParamBlock::kB: break;
    }
    return grads.d_b[static_cast<Eigen::Index>(index)];
}

FdGradient fd_gradient(const LayerParams& params, const Graph& graph, const FeatureMatrix& features,
                       NodeId target, const LossSpec& spec, const FdConfig& config) {
    config.validate();
    const ForwardTrace base = forward_with_trace(params, graph, features, target);
    loss(base.h_out, spec);  // shape check at the base point

    FdGradient out{GradientSet::zeros_like(params), {}};
    LayerParams probe = params;
    for (const ParamBlock block : kAllBlocks) {
        const std::size_t count = block_size(params, block);
        for (std::size_t index = 0; index < count; ++index) {
            double& entry = param_entry(probe, block, index);
            const double original = entry;

            entry = original + config.step;
            const ForwardTrace plus = forward_with_trace(probe, graph, features, target);
            entry = original - config.step;
            const ForwardTrace minus = forward_with_trace(probe, graph, features, target);
            entry = original;

            const double l_plus = loss(plus.h_out, spec).value;
            const double l_minus = loss(minus.h_out, spec).value;
            if (!std::isfinite(l_plus) || !std::isfinite(l_minus)) {
                throw InputError("non-finite loss while perturbing " + std::string(block_name(block)) +
                                 "[" + std::to_string(index) + "]");
            }
            const double derivative = (l_plus - l_minus) / (2.0 * config.step);
            switch (block) {
                case ParamBlock::kThetaR: matrix_entry(out.values.d_theta_R, index) = derivative; break;
                case ParamBlock::kThetaL: matrix_entry(out.values.d_theta_L, index) = derivative; break;
                case ParamBlock::kA: out.values.d_a[static_cast<Eigen::Index>(index)] = derivative; break;
                case ParamBlock::kB: out.values.d_b[static_cast<Eigen::Index>(index)] = derivative; break;
            }
            if (near_kink(base, plus, minus, config.kink_guard)) {
                out.kink_flagged[block_pos(block)].push_back(index);
            }
        }
    }
    return out;
}

double relative_error(double x, double y, double floor) {
    return std::abs(x - y) / std::max({std::abs(x), std::abs(y), floor});
}

std::optional<std::pair<ParamBlock, std::size_t>> GradCheckReport::worst() const {
    std::optional<std::pair<ParamBlock, std::size_t>> best;
    double worst_err = -1.0;
    for (const ParamBlock block : kAllBlocks) {
        const auto& check = (*this)[block];
        if (check.worst_index && check.max_rel_err > worst_err) {
            worst_err = check.max_rel_err;
            best = std::make_pair(block, *check.worst_index);
        }
    }
    return best;
}

double comparison_floor(const GradientSet& lhs, const GradientSet& rhs) {
    auto largest = [](const GradientSet& g) {
        double m = 0.0;
        for (const double v : g.d_theta_R.reshaped()) m = std::max(m, std::abs(v));
        for (const double v : g.d_theta_L.reshaped()) m = std::max(m, std::abs(v));
        for (const double v : g.d_a) m = std::max(m, std::abs(v));
        for (const double v : g.d_b) m = std::max(m, std::abs(v));
        return m;
    };
    return std::max({kRelativeErrorFloor, largest(lhs), largest(rhs)});
}

namespace {

GradCheckReport compare_impl(const GradientSet& lhs, const GradientSet& rhs, double tolerance,
                             const std::array<std::vector<std::size_t>, 4>* flagged) {
    GradCheckReport report;
    const double floor = comparison_floor(lhs, rhs);
    auto shape_of = [](const GradientSet& g) {
        return std::array<Eigen::Index, 6>{g.d_theta_R.rows(), g.d_theta_R.cols(), g.d_theta_L.rows(),
                                           g.d_theta_L.cols(), g.d_a.size(), g.d_b.size()};
    };
    if (shape_of(lhs) != shape_of(rhs)) {
        throw InputError("gradient sets have different shapes");
    }
    for (const ParamBlock block : kAllBlocks) {
        ParamCheck& check = report.params[block_pos(block)];
        check.name = std::string(block_name(block));
        if (flagged != nullptr) {
            check.kink_flagged = (*flagged)[block_pos(block)];
        }
        const std::size_t count = [&] {
            switch (block) {
                case ParamBlock::kThetaR: return static_cast<std::size_t>(lhs.d_theta_R.size());
                case ParamBlock::kThetaL: return static_cast<std::size_t>(lhs.d_theta_L.size());
                case ParamBlock::kA: return static_cast<std::size_t>(lhs.d_a.size());
                case ParamBlock::kB: break;
            }
            return static_cast<std::size_t>(lhs.d_b.size());
        }();
        for (std::size_t index = 0; index < count; ++index) {
            if (std::binary_search(check.kink_flagged.begin(), check.kink_flagged.end(), index)) {
                continue;
            }
            const double err =
                relative_error(gradient_entry(lhs, block, index), gradient_entry(rhs, block, index), floor);
            if (!check.worst_index || err > check.max_rel_err || std::isnan(err)) {
                check.max_rel_err = err;
                check.worst_index = index;
            }
        }
        check.pass = !(check.max_rel_err > tolerance) && !std::isnan(check.max_rel_err);
        report.pass = report.pass && check.pass;
    }
    return report;
}

}  // namespace

GradCheckReport compare(const GradientSet& analytic, const FdGradient& numeric, const FdConfig& config) {
    return compare_impl(analytic, numeric.values, config.tolerance, &numeric.kink_flagged);
}

GradCheckReport compare(const GradientSet& lhs, const GradientSet& rhs, double tolerance) {
    return compare_impl(lhs, rhs, tolerance, nullptr);
}

}  // namespace gatgrad
