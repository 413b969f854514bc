#include "pwlip/network.hpp"

#include "pwlip/error.hpp"

#include <string>

namespace pwlip {

namespace {

std::string layer_name(std::size_t i) { return "layer " + std::to_string(i + 1); }

}  // namespace

Network::Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw Error(ErrorKind::InvalidInput, "network has no layers");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Layer& ly = layers_[i];
        if (!ly.activation) throw Error(ErrorKind::InvalidInput, layer_name(i) + " has no activation");
        if (ly.W.rows() == 0 || ly.W.cols() == 0) throw Error(ErrorKind::Dimension, layer_name(i) + " has an empty weight matrix");
        if (ly.w.size() != ly.W.rows()) {
            throw Error(ErrorKind::Dimension, layer_name(i) + ": bias length " + std::to_string(ly.w.size()) +
                                                  " does not match " + std::to_string(ly.W.rows()) + " rows");
        }
        if (!ly.W.allFinite() || !ly.w.allFinite()) {
            throw Error(ErrorKind::InvalidInput, layer_name(i) + " has a NaN or infinite weight");
        }
        if (ly.activation->input_width() != ly.W.rows()) {
            throw Error(ErrorKind::Dimension, layer_name(i) + ": activation width " +
                                                  std::to_string(ly.activation->input_width()) + " does not match " +
                                                  std::to_string(ly.W.rows()) + " affine outputs");
        }
        if (i > 0 && ly.W.cols() != layers_[i - 1].activation->output_width()) {
            throw Error(ErrorKind::Dimension, layer_name(i) + ": weight matrix has " + std::to_string(ly.W.cols()) +
                                                  " columns but the previous layer outputs " +
                                                  std::to_string(layers_[i - 1].activation->output_width()));
        }
    }
}

Vector forward(const Network& net, const Vector& x) {
    if (x.size() != net.input_dim()) throw Error(ErrorKind::Dimension, "input has wrong dimension");
    Vector h = x;
    for (const Layer& ly : net.layers()) h = ly.activation->evaluate(ly.W * h + ly.w);
    return h;
}

PointJacobian jacobian_at(const Network& net, const Vector& x) {
    if (x.size() != net.input_dim()) throw Error(ErrorKind::Dimension, "input has wrong dimension");
    Matrix J = Matrix::Identity(x.size(), x.size());
    Vector h = x;
    bool boundary = false;
    for (const Layer& ly : net.layers()) {
        const Vector pre = ly.W * h + ly.w;
        const PieceSelection sel = select_pieces(*ly.activation, pre, kBoundaryTol);
        boundary = boundary || sel.near_boundary;
        // Same association order as lin_prop/fold_layer: T (W J).
        J = sel.T * (ly.W * J);
        h = sel.T * pre + sel.t;
    }
    return {std::move(J), boundary};
}

LinearPrefix fold_layer(const Network& net, const LinearPrefix& prefix, int l, const IntervalMatrix& lambda_mat,
                        const IntervalMatrix& lambda_vec) {
    if (!lambda_mat.is_degenerate() || !lambda_vec.is_degenerate()) {
        throw Error(ErrorKind::NotFixedLinear,
                    "activation layer " + std::to_string(l) + " is not fixed linear on the region");
    }
    const Matrix& T = lambda_mat.lower();
    const Vector t = lambda_vec.lower().col(0);
    Matrix J = T * prefix.J;
    Vector b = T * prefix.b + t;
    if (l < net.depth()) {
        const Layer& next = net.layer(l + 1);
        J = next.W * J;
        b = next.W * b + next.w;
    }
    return {std::move(J), std::move(b)};
}

LinearPrefix lin_prop(const Network& net, std::span<const IntervalMatrix> lambda_mat,
                      std::span<const IntervalMatrix> lambda_vec, int end) {
    if (end < 1 || end > net.depth() + 1) {
        throw Error(ErrorKind::InvalidInput, "lin_prop end layer " + std::to_string(end) + " out of range");
    }
    if (static_cast<int>(lambda_mat.size()) < end - 1 || static_cast<int>(lambda_vec.size()) < end - 1) {
        throw Error(ErrorKind::InvalidInput, "lin_prop needs an activation state for every folded layer");
    }
    LinearPrefix p{net.layer(1).W, net.layer(1).w};
    for (int l = 1; l < end; ++l) {
        p = fold_layer(net, p, l, lambda_mat[static_cast<std::size_t>(l - 1)],
                       lambda_vec[static_cast<std::size_t>(l - 1)]);
    }
    return p;
}

}  // namespace pwlip
