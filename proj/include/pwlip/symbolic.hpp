#pragma once

#include "pwlip/network.hpp"
#include "pwlip/polyhedron.hpp"

#include <vector>

namespace pwlip {

/// Per-layer activation states over a region: interval hulls of the slopes
/// and biases of every piece that meets the region, and the star neurons
/// (neurons with at least two meeting pieces of different parameters).
struct ActivationPattern {
    std::vector<IntervalMatrix> lambda_mat;  // layer l at [l-1]: d_out x d_in
    std::vector<IntervalMatrix> lambda_vec;  // d_out x 1
    std::vector<std::vector<Eigen::Index>> stars;
    int first_star = 1;  // smallest layer with stars, depth()+1 when none

    bool has_stars() const;
    int recompute_first_star() const;
};

/// Symbolic state after one activation layer: post-activations equal
/// B z + b for some z in `domain` (the original inputs followed by the
/// auxiliary variables introduced so far).
struct SymState {
    Matrix B;
    Vector b;
    Polyhedron domain;
    Eigen::Index aux_count = 0;
};

/// Which (layer, neuron) introduced each auxiliary variable, in column order.
struct AuxOrigin {
    int layer;
    Eigen::Index neuron;
};

struct SymPropResult {
    ActivationPattern pattern;
    std::vector<SymState> states;  // one per layer
    std::vector<AuxOrigin> aux;
};

/// Symbolic propagation of the input region through the network. Throws
/// ErrorKind::Infeasible on an empty region and ErrorKind::InvalidInput on a
/// region without interior.
SymPropResult symprop(const Network& net, const Polyhedron& omega);

/// Rejects empty or flat regions with the errors documented above.
void require_full_dimensional(const Polyhedron& omega, Eigen::Index input_dim);

}  // namespace pwlip
