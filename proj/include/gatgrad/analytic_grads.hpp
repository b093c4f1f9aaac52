#ifndef GATGRAD_ANALYTIC_GRADS_HPP
#define GATGRAD_ANALYTIC_GRADS_HPP

#include <vector>

#include "gatgrad/layer.hpp"
#include "gatgrad/types.hpp"

namespace gatgrad {

/// Per-neighbor LeakyReLU derivative: s[k][t] = 1 if a4[k][t] > 0, else the
/// negative slope.
struct SlopeIndicator {
    std::vector<Vector> s;
};

/// Loss gradients for every trainable parameter, for one target node.
struct GradientSet {
    Matrix d_theta_R;
    Matrix d_theta_L;
    Vector d_a;
    Vector d_b;

    static GradientSet zeros_like(const LayerParams& params);
};

/// dL/dh' for the target node.
class UpstreamGradient {
public:
    explicit UpstreamGradient(Vector g);
    static UpstreamGradient uniform(std::size_t out_dim, double value = 1.0);

    const Vector& g() const { return g_; }
    /// True when every entry is equal, the case in which the closed forms are exact.
    bool is_constant() const;

private:
    Vector g_;
};

SlopeIndicator slope_indicators(const ForwardTrace& trace, double negative_slope);

/// N x N matrix M[l][j] = alpha_l (delta_lj - alpha_j). Throws InputError if
/// alpha does not sum to 1 within 1e-9.
Matrix softmax_jacobian(const Vector& alpha);

/// Sum over the D entries of theta_L * h_aug (the collapsed message A_7).
double summed_message(const Matrix& theta_L, const Vector& h_aug);
double summed_message(const Matrix& theta_L, const AugmentedFeature& h_aug);

/// S_k = sum_j (delta_kj - alpha_j) * message[j], i.e. message[k] minus the
/// attention-weighted mean. Throws InputError if k is out of range.
double message_deviation(std::size_t k, const Vector& alpha, const Vector& message);

// Closed forms. These pair output row t with upstream entry g[t] and use the
// collapsed message sum, so they equal the true gradient only when the
// upstream gradient is a constant vector. backward_chain() is exact for any
// upstream.

/// Theta_R gradient, summation form: row t = g[t] a[t] sum_k s_k[t] alpha_k S_k * h_target^T.
Matrix grad_theta_R_sum(const ForwardTrace& trace, const LayerParams& params,
                        const UpstreamGradient& upstream);

/// Theta_R gradient, pairwise form over unordered neighbor pairs {j, k}:
/// row t = g[t] a[t] sum alpha_j alpha_k (A_j - A_k)(s_j[t] - s_k[t]) * h_target^T.
/// A row is exactly zero whenever all neighbors share the slope in that row.
Matrix grad_theta_R_pairwise(const ForwardTrace& trace, const LayerParams& params,
                             const UpstreamGradient& upstream);

/// Theta_L gradient: row t = g[t] sum_k [a[t] s_k[t] alpha_k S_k + alpha_k] * h_k^T.
///
/// The second summand is the direct aggregation path. The bias column
/// (h_k entry 0 = 1) is the Theta_{L_b} row; both displayed formulas in the
/// source derivation carry the weight label, and the second is read as bias.
Matrix grad_theta_L(const ForwardTrace& trace, const LayerParams& params,
                    const UpstreamGradient& upstream);

/// Identity Jacobian: returns g unchanged.
Vector grad_b(const UpstreamGradient& upstream);

/// d_a = sum_k (dL/de_k) a5[k], with dL/de_k = alpha_k (B_k - sum_j alpha_j B_j)
/// and B_k = g . (theta_L h_k). Exact for any upstream.
Vector grad_a(const ForwardTrace& trace, const LayerParams& params, const UpstreamGradient& upstream);

/// grad_theta_R_sum, grad_theta_L, grad_a and grad_b bundled.
GradientSet closed_form_gradients(const ForwardTrace& trace, const LayerParams& params,
                                  const UpstreamGradient& upstream);

/// Full backward pass as a product of explicitly assembled Jacobians, walking
/// the graph h' <- a9 <- a8 <- a7 <- a6 <- a5 <- a4 <- {a2, a3} <- Theta.
/// Matrices are vectorized row by row. Keeps the full D-vector message
/// Jacobian, so it is valid for non-uniform upstream gradients.
GradientSet backward_chain(const ForwardTrace& trace, const LayerParams& params,
                           const UpstreamGradient& upstream);

/// d vec(M x) / d vec(M)^T for a rows x len(x) matrix M vectorized row by row:
/// block-diagonal with x^T repeated `rows` times.
Matrix row_vec_jacobian(const Vector& x, Eigen::Index rows);

}  // namespace gatgrad

#endif  // GATGRAD_ANALYTIC_GRADS_HPP
