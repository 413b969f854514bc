#include "pwlip/bnb.hpp"

#include "pwlip/error.hpp"

#include <algorithm>
#include <sstream>

namespace pwlip {

namespace {

struct Enumerator {
    const Network& net;
    const NormPair& np;
    OracleResult result;

    // Pre-activation of layer l is J x + b; T, t collect the chosen pieces.
    void visit(int l, Eigen::Index g, const Polyhedron& region, const LinearPrefix& pre, Matrix& T, Vector& t) {
        const PwlActivation& act = *net.layer(l).activation;
        if (g == act.num_groups()) {
            LinearPrefix post{T * pre.J, T * pre.b + t};
            if (l == net.depth()) {
                ++result.feasible;
                result.value = std::max(result.value, induced_norm(post.J, np));
                return;
            }
            const Layer& next = net.layer(l + 1);
            LinearPrefix next_pre{next.W * post.J, next.W * post.b + next.w};
            const PwlActivation& next_act = *next.activation;
            Matrix T2 = Matrix::Zero(next_act.output_width(), next_act.input_width());
            Vector t2 = Vector::Zero(next_act.output_width());
            visit(l + 1, 0, region, next_pre, T2, t2);
            return;
        }
        const auto pieces = act.group_pieces(g);
        for (const NeuronPiece& p : pieces) {
            const bool single = pieces.size() == 1;
            Polyhedron r = single ? region : stack(region, affine_preimage(p.region, pre.J, pre.b));
            if (!single && !has_interior(r)) continue;
            for (std::size_t k = 0; k < p.fixed_neurons.size(); ++k) {
                T.row(p.fixed_neurons[k]) = p.T.row(static_cast<Eigen::Index>(k));
                t(p.fixed_neurons[k]) = p.t(static_cast<Eigen::Index>(k));
            }
            visit(l, g + 1, r, pre, T, t);
        }
    }
};

}  // namespace

double oracle_combinations(const Network& net) {
    double count = 1.0;
    for (const Layer& ly : net.layers()) {
        for (Eigen::Index g = 0; g < ly.activation->num_groups(); ++g) {
            count *= static_cast<double>(ly.activation->group_pieces(g).size());
        }
    }
    return count;
}

OracleResult brute_force_oracle(const Network& net, const Polyhedron& omega, const NormPair& np,
                                double max_combinations) {
    const double count = oracle_combinations(net);
    if (count > max_combinations) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "brute-force enumeration needs " << count << " piece combinations (limit " << max_combinations << ")";
        throw Error(ErrorKind::Guardrail, msg.str());
    }
    require_full_dimensional(omega, net.input_dim());
    Enumerator e{net, np, {}};
    e.result.combinations = count;
    const Layer& first = net.layer(1);
    Matrix T = Matrix::Zero(first.activation->output_width(), first.activation->input_width());
    Vector t = Vector::Zero(first.activation->output_width());
    e.visit(1, 0, omega, LinearPrefix{first.W, first.w}, T, t);
    return e.result;
}

}  // namespace pwlip
