#pragma once

#include "pwlip/activation.hpp"
#include "pwlip/interval_matrix.hpp"

#include <vector>

namespace pwlip {

/// Pre-activations within this distance of a second piece flag a sample as
/// possibly non-differentiable.
inline constexpr double kBoundaryTol = 1e-9;

/// One affine map followed by a PWL activation.
struct Layer {
    Matrix W;
    Vector w;
    ActivationPtr activation;
};

/// f = alpha_L o W_L o ... o alpha_1 o W_1 with strict alternation.
class Network {
public:
    /// Validates shapes, finiteness and chaining; throws ErrorKind::Dimension
    /// naming the offending (1-based) layer.
    explicit Network(std::vector<Layer> layers);

    Eigen::Index input_dim() const noexcept { return layers_.front().W.cols(); }
    Eigen::Index output_dim() const noexcept { return layers_.back().activation->output_width(); }
    /// L, the number of affine/activation pairs.
    int depth() const noexcept { return static_cast<int>(layers_.size()); }
    /// 1-based access matching the layer numbering used throughout.
    const Layer& layer(int l) const { return layers_.at(static_cast<std::size_t>(l - 1)); }
    const std::vector<Layer>& layers() const noexcept { return layers_; }

private:
    std::vector<Layer> layers_;
};

Vector forward(const Network& net, const Vector& x);

struct PointJacobian {
    Matrix J;            // d_L x d_0
    bool near_boundary;  // some pre-activation within kBoundaryTol of a piece boundary
};

/// Jacobian of the affine piece selected at x (lowest-index piece on ties).
PointJacobian jacobian_at(const Network& net, const Vector& x);

/// Affine function x -> J x + b of the network folded up to some depth.
struct LinearPrefix {
    Matrix J;
    Vector b;
};

/// Folds W_1, alpha_1, ..., alpha_{end-1}, W_end into one affine map using the
/// (necessarily degenerate) activation states lambda_mat[l-1], lambda_vec[l-1].
/// end = L+1 folds the whole network (W_{L+1} is the identity).
/// Throws ErrorKind::NotFixedLinear if a folded state is not degenerate.
LinearPrefix lin_prop(const Network& net, std::span<const IntervalMatrix> lambda_mat,
                      std::span<const IntervalMatrix> lambda_vec, int end);

/// Extends a prefix ending at W_l through alpha_l and W_{l+1}.
LinearPrefix fold_layer(const Network& net, const LinearPrefix& prefix, int l, const IntervalMatrix& lambda_mat,
                        const IntervalMatrix& lambda_vec);

}  // namespace pwlip
