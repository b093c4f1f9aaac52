#include "gatgrad/analytic_grads.hpp"

#include <cmath>
#include <string>

namespace gatgrad {

namespace {

Eigen::Index idx(std::size_t k) { return static_cast<Eigen::Index>(k); }

void require_upstream(const LayerParams& params, const UpstreamGradient& upstream) {
    if (upstream.g().size() != params.a.size()) {
        throw InputError("upstream gradient has length " + std::to_string(upstream.g().size()) +
                         ", expected D = " + std::to_string(params.a.size()));
    }
}

Vector summed_messages(const ForwardTrace& trace, const LayerParams& params) {
    Vector sums(idx(trace.size()));
    for (std::size_t k = 0; k < trace.size(); ++k) {
        sums[idx(k)] = summed_message(params.theta_L, trace.h_neighbor[k]);
    }
    return sums;
}

Vector message_deviations(const Vector& alpha, const Vector& message) {
    Vector dev(alpha.size());
    for (Eigen::Index k = 0; k < alpha.size(); ++k) {
        dev[k] = message_deviation(static_cast<std::size_t>(k), alpha, message);
    }
    return dev;
}

// Reshapes a 1 x (rows*cols) row-major vectorization back to rows x cols.
Matrix unvec_rows(const Eigen::RowVectorXd& v, Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        m.row(r) = v.segment(r * cols, cols);
    }
    return m;
}

Vector vec_rows(const Matrix& m) {
    Vector v(m.size());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        v.segment(r * m.cols(), m.cols()) = m.row(r).transpose();
    }
    return v;
}

}  // namespace

GradientSet GradientSet::zeros_like(const LayerParams& params) {
    return GradientSet{Matrix::Zero(params.theta_R.rows(), params.theta_R.cols()),
                       Matrix::Zero(params.theta_L.rows(), params.theta_L.cols()),
                       Vector::Zero(params.a.size()), Vector::Zero(params.b.size())};
}

UpstreamGradient::UpstreamGradient(Vector g) : g_(std::move(g)) {
    if (!g_.allFinite()) {
        throw InputError("upstream gradient must be finite");
    }
}

UpstreamGradient UpstreamGradient::uniform(std::size_t out_dim, double value) {
    return UpstreamGradient(Vector::Constant(idx(out_dim), value));
}

bool UpstreamGradient::is_constant() const {
    return g_.size() == 0 || (g_.array() == g_[0]).all();
}

SlopeIndicator slope_indicators(const ForwardTrace& trace, double negative_slope) {
    SlopeIndicator out;
    out.s.reserve(trace.a4.size());
    for (const auto& pre : trace.a4) {
        out.s.push_back(pre.unaryExpr([negative_slope](double v) { return v > 0.0 ? 1.0 : negative_slope; }));
    }
    return out;
}

Matrix softmax_jacobian(const Vector& alpha) {
    if (alpha.size() > 0 && std::abs(alpha.sum() - 1.0) > 1e-9) {
        throw InputError("softmax Jacobian needs normalized attention weights");
    }
    const Eigen::Index n = alpha.size();
    Matrix jac(n, n);
    for (Eigen::Index l = 0; l < n; ++l) {
        for (Eigen::Index j = 0; j < n; ++j) {
            jac(l, j) = alpha[l] * ((l == j ? 1.0 : 0.0) - alpha[j]);
        }
    }
    return jac;
}

double summed_message(const Matrix& theta_L, const Vector& h_aug) {
    if (theta_L.cols() != h_aug.size()) {
        throw InputError("augmented feature length does not match theta_L columns");
    }
    return (theta_L * h_aug).sum();
}

double summed_message(const Matrix& theta_L, const AugmentedFeature& h_aug) {
    return summed_message(theta_L, h_aug.values());
}

double message_deviation(std::size_t k, const Vector& alpha, const Vector& message) {
    if (alpha.size() != message.size()) {
        throw InputError("alpha and message lengths differ");
    }
    if (k >= static_cast<std::size_t>(alpha.size())) {
        throw InputError("neighbor index " + std::to_string(k) + " out of range");
    }
    double acc = 0.0;
    for (Eigen::Index j = 0; j < alpha.size(); ++j) {
        const double coeff = (j == idx(k)) ? 1.0 - alpha[j] : -alpha[j];
        acc += coeff * message[j];
    }
    return acc;
}

Matrix grad_theta_R_sum(const ForwardTrace& trace, const LayerParams& params,
                        const UpstreamGradient& upstream) {
    require_upstream(params, upstream);
    const Eigen::Index d = params.theta_R.rows();
    Matrix grad = Matrix::Zero(d, params.theta_R.cols());
    if (trace.size() <= 1) {
        return grad;
    }
    const auto slopes = slope_indicators(trace, params.negative_slope);
    const Vector dev = message_deviations(trace.alpha, summed_messages(trace, params));
    const Vector& g = upstream.g();
    for (Eigen::Index t = 0; t < d; ++t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < trace.size(); ++k) {
            acc += slopes.s[k][t] * trace.alpha[idx(k)] * dev[idx(k)];
        }
        grad.row(t) = (g[t] * params.a[t] * acc) * trace.h_target.transpose();
    }
    return grad;
}

Matrix grad_theta_R_pairwise(const ForwardTrace& trace, const LayerParams& params,
                             const UpstreamGradient& upstream) {
    require_upstream(params, upstream);
    const Eigen::Index d = params.theta_R.rows();
    Matrix grad = Matrix::Zero(d, params.theta_R.cols());
    if (trace.size() <= 1) {
        return grad;
    }
    const auto slopes = slope_indicators(trace, params.negative_slope);
    const Vector msg = summed_messages(trace, params);
    const Vector& alpha = trace.alpha;
    const Vector& g = upstream.g();
    const std::size_t n = trace.size();
    for (Eigen::Index t = 0; t < d; ++t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = k + 1; j < n; ++j) {
                const double slope_gap = slopes.s[k][t] - slopes.s[j][t];
                if (slope_gap == 0.0) {
                    continue;
                }
                acc += alpha[idx(k)] * alpha[idx(j)] * (msg[idx(k)] - msg[idx(j)]) * slope_gap;
            }
        }
        grad.row(t) = (g[t] * params.a[t] * acc) * trace.h_target.transpose();
    }
    return grad;
}

Matrix grad_theta_L(const ForwardTrace& trace, const LayerParams& params,
                    const UpstreamGradient& upstream) {
    require_upstream(params, upstream);
    const Eigen::Index d = params.theta_L.rows();
    Matrix grad = Matrix::Zero(d, params.theta_L.cols());
    if (trace.size() == 0) {
        return grad;
    }
    const auto slopes = slope_indicators(trace, params.negative_slope);
    const Vector dev = message_deviations(trace.alpha, summed_messages(trace, params));
    const Vector& g = upstream.g();
    for (Eigen::Index t = 0; t < d; ++t) {
        for (std::size_t k = 0; k < trace.size(); ++k) {
            const double alpha_k = trace.alpha[idx(k)];
            const double attention_path = params.a[t] * slopes.s[k][t] * alpha_k * dev[idx(k)];
            grad.row(t) += (g[t] * (attention_path + alpha_k)) * trace.h_neighbor[k].transpose();
        }
    }
    return grad;
}

Vector grad_b(const UpstreamGradient& upstream) {
    return upstream.g();
}

Vector grad_a(const ForwardTrace& trace, const LayerParams& params, const UpstreamGradient& upstream) {
    require_upstream(params, upstream);
    Vector grad = Vector::Zero(params.a.size());
    if (trace.size() <= 1) {
        return grad;
    }
    Vector msg(idx(trace.size()));
    for (std::size_t k = 0; k < trace.size(); ++k) {
        msg[idx(k)] = upstream.g().dot(trace.a3[k]);
    }
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double d_score = trace.alpha[idx(k)] * message_deviation(k, trace.alpha, msg);
        grad += d_score * trace.a5[k];
    }
    return grad;
}

GradientSet closed_form_gradients(const ForwardTrace& trace, const LayerParams& params,
                                  const UpstreamGradient& upstream) {
    return GradientSet{grad_theta_R_sum(trace, params, upstream), grad_theta_L(trace, params, upstream),
                       grad_a(trace, params, upstream), grad_b(upstream)};
}

Matrix row_vec_jacobian(const Vector& x, Eigen::Index rows) {
    const Eigen::Index cols = x.size();
    Matrix jac = Matrix::Zero(rows, rows * cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        jac.block(r, r * cols, 1, cols) = x.transpose();
    }
    return jac;
}

GradientSet backward_chain(const ForwardTrace& trace, const LayerParams& params,
                           const UpstreamGradient& upstream) {
    require_upstream(params, upstream);
    const Eigen::Index d = params.a.size();
    const Eigen::Index cols = params.theta_R.cols();
    const std::size_t n = trace.size();
    const Matrix eye_d = Matrix::Identity(d, d);

    GradientSet out = GradientSet::zeros_like(params);
    out.d_b = grad_b(upstream);  // d h' / d b = I
    if (n == 0) {
        return out;
    }

    const Eigen::RowVectorXd g = upstream.g().transpose();
    const Vector theta_L_vec = vec_rows(params.theta_L);

    // h' -> a9 -> a8 -> a7 (= alpha), one neighbor at a time.
    std::vector<Eigen::RowVectorXd> j_a8(n);
    Eigen::RowVectorXd j_a7(idx(n));
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::RowVectorXd j_a9 = g * eye_d;
        j_a8[k] = j_a9 * row_vec_jacobian(trace.h_neighbor[k], d);  // a9 = a8 h_k
        j_a7[idx(k)] = j_a8[k].dot(theta_L_vec.transpose());         // a8 = alpha_k Theta_L
    }

    // a7 -> a6 (raw scores) through the softmax.
    const Eigen::RowVectorXd j_a6 = j_a7 * softmax_jacobian(trace.alpha);

    const auto slopes = slope_indicators(trace, params.negative_slope);
    Eigen::RowVectorXd j_theta_R = Eigen::RowVectorXd::Zero(d * cols);
    Eigen::RowVectorXd j_theta_L = Eigen::RowVectorXd::Zero(d * cols);
    Eigen::RowVectorXd j_a = Eigen::RowVectorXd::Zero(d);
    const Matrix eye_params = Matrix::Identity(d * cols, d * cols);
    const Matrix shared_jac = row_vec_jacobian(trace.h_target, d);
    for (std::size_t k = 0; k < n; ++k) {
        const double j_score = j_a6[idx(k)];
        const Eigen::RowVectorXd j_a5 = j_score * params.a.transpose();  // a6 = a . a5
        const Eigen::RowVectorXd j_a4 = j_a5 * slopes.s[k].asDiagonal();
        const Eigen::RowVectorXd j_a2 = j_a4 * eye_d;                    // a4 = a2 + a3
        const Eigen::RowVectorXd j_a3 = j_a4 * eye_d;
        j_theta_R += j_a2 * shared_jac;                                  // a2 = Theta_R h_i
        j_theta_L += j_a3 * row_vec_jacobian(trace.h_neighbor[k], d);    // a3 = Theta_L h_k
        j_theta_L += j_a8[k] * (trace.alpha[idx(k)] * eye_params);       // a8 = alpha_k Theta_L
        j_a += j_score * trace.a5[k].transpose();
    }

    out.d_theta_R = unvec_rows(j_theta_R, d, cols);
    out.d_theta_L = unvec_rows(j_theta_L, d, cols);
    out.d_a = j_a.transpose();
    return out;
}

}  // namespace gatgrad
