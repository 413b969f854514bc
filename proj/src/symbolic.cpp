#include "pwlip/symbolic.hpp"

#include "pwlip/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pwlip {

bool ActivationPattern::has_stars() const {
    return std::any_of(stars.begin(), stars.end(), [](const auto& s) { return !s.empty(); });
}

int ActivationPattern::recompute_first_star() const {
    for (std::size_t l = 0; l < stars.size(); ++l) {
        if (!stars[l].empty()) return static_cast<int>(l) + 1;
    }
    return static_cast<int>(stars.size()) + 1;
}

void require_full_dimensional(const Polyhedron& omega, Eigen::Index input_dim) {
    if (omega.dim() != input_dim) {
        throw Error(ErrorKind::Dimension, "region dimension " + std::to_string(omega.dim()) +
                                              " does not match network input dimension " + std::to_string(input_dim));
    }
    const double r = inscribed_radius(omega);
    if (r > kInteriorTol) return;
    if (!is_feasible(omega)) throw Error(ErrorKind::Infeasible, "input region is empty");
    throw Error(ErrorKind::InvalidInput, "input region has no interior");
}

namespace {

struct PieceState {
    Eigen::RowVectorXd row;
    double bias;
};

bool same_state(const PieceState& a, const PieceState& b) { return a.bias == b.bias && a.row == b.row; }

}  // namespace

SymPropResult symprop(const Network& net, const Polyhedron& omega) {
    require_full_dimensional(omega, net.input_dim());
    constexpr double inf = std::numeric_limits<double>::infinity();
    const Eigen::Index d0 = net.input_dim();

    SymPropResult out;
    ActivationPattern& pat = out.pattern;
    Matrix B_hat = Matrix::Identity(d0, d0);
    Vector b_hat = Vector::Zero(d0);
    Polyhedron domain = omega;

    for (int l = 1; l <= net.depth(); ++l) {
        const Layer& ly = net.layer(l);
        const PwlActivation& act = *ly.activation;
        const Matrix B_t = ly.W * B_hat;
        const Vector b_t = ly.W * b_hat + ly.w;
        const Eigen::Index dim = domain.dim();
        const Eigen::Index out_w = act.output_width(), in_w = act.input_width();

        Matrix lam_lo(out_w, in_w), lam_hi(out_w, in_w);
        Vector vec_lo(out_w), vec_hi(out_w);
        Matrix T = Matrix::Zero(out_w, in_w);
        Vector t = Vector::Zero(out_w);
        std::vector<Eigen::Index> stars;

        // Feasible pieces per group, tested on the symbolic domain.
        std::vector<std::vector<std::size_t>> feasible(static_cast<std::size_t>(act.num_groups()));
        std::vector<std::vector<Polyhedron>> regions(static_cast<std::size_t>(act.num_groups()));
        for (Eigen::Index g = 0; g < act.num_groups(); ++g) {
            const auto pieces = act.group_pieces(g);
            auto& feas = feasible[static_cast<std::size_t>(g)];
            auto& regs = regions[static_cast<std::size_t>(g)];
            for (const NeuronPiece& p : pieces) regs.push_back(stack(domain, affine_preimage(p.region, B_t, b_t)));
            for (std::size_t i = 0; i < pieces.size(); ++i) {
                if (pieces.size() == 1 || has_interior(regs[i])) feas.push_back(i);
            }
            if (feas.empty()) {
                for (std::size_t i = 0; i < pieces.size(); ++i) {
                    if (is_feasible(regs[i])) feas.push_back(i);
                }
            }
            if (feas.empty()) {
                throw Error(ErrorKind::SolverFailure,
                            "no activation piece meets the region at layer " + std::to_string(l));
            }
        }

        for (Eigen::Index n = 0; n < out_w; ++n) {
            const Eigen::Index g = act.group_of(n);
            const auto pieces = act.group_pieces(g);
            std::vector<PieceState> states;
            for (std::size_t i : feasible[static_cast<std::size_t>(g)]) states.push_back({pieces[i].row(n), pieces[i].bias(n)});
            Eigen::RowVectorXd lo = states.front().row, hi = states.front().row;
            double blo = states.front().bias, bhi = states.front().bias;
            bool star = false;
            for (const PieceState& s : states) {
                lo = lo.cwiseMin(s.row);
                hi = hi.cwiseMax(s.row);
                blo = std::min(blo, s.bias);
                bhi = std::max(bhi, s.bias);
                star = star || !same_state(s, states.front());
            }
            lam_lo.row(n) = lo;
            lam_hi.row(n) = hi;
            vec_lo(n) = blo;
            vec_hi(n) = bhi;
            if (star) {
                stars.push_back(n);
            } else {
                T.row(n) = states.front().row;
                t(n) = states.front().bias;
            }
        }

        // Concretize star post-activations into box-bounded auxiliaries.
        std::vector<std::pair<double, double>> aux_bounds;
        std::vector<Eigen::Index> aux_neurons;
        Vector constant_star = Vector::Zero(out_w);
        std::vector<char> is_constant(static_cast<std::size_t>(out_w), 0);
        for (Eigen::Index n : stars) {
            const Eigen::Index g = act.group_of(n);
            const auto pieces = act.group_pieces(g);
            double lo = inf, hi = -inf;
            for (std::size_t i : feasible[static_cast<std::size_t>(g)]) {
                const Eigen::RowVectorXd row = pieces[i].row(n);
                const Vector obj = (row * B_t).transpose();
                const double offset = row.dot(b_t) + pieces[i].bias(n);
                const LinearRange r = linear_bounds(regions[static_cast<std::size_t>(g)][i], obj);
                lo = std::min(lo, r.lo + offset);
                hi = std::max(hi, r.hi + offset);
            }
            if (std::isfinite(lo) && std::isfinite(hi) && hi - lo <= 1e-12 * (1.0 + std::abs(lo))) {
                is_constant[static_cast<std::size_t>(n)] = 1;
                constant_star(n) = 0.5 * (lo + hi);
                continue;
            }
            aux_bounds.emplace_back(lo, hi);
            aux_neurons.push_back(n);
        }

        const auto k = static_cast<Eigen::Index>(aux_neurons.size());
        Matrix B_next = Matrix::Zero(out_w, dim + k);
        B_next.leftCols(dim) = T * B_t;
        Vector b_next = T * b_t + t;
        for (Eigen::Index n = 0; n < out_w; ++n) {
            if (is_constant[static_cast<std::size_t>(n)]) b_next(n) = constant_star(n);
        }
        for (Eigen::Index a = 0; a < k; ++a) {
            B_next(aux_neurons[static_cast<std::size_t>(a)], dim + a) = 1.0;
            out.aux.push_back({l, aux_neurons[static_cast<std::size_t>(a)]});
        }
        if (k > 0) {
            Vector lower = Vector::Constant(dim + k, -inf), upper = Vector::Constant(dim + k, inf);
            for (Eigen::Index a = 0; a < k; ++a) {
                lower(dim + a) = aux_bounds[static_cast<std::size_t>(a)].first;
                upper(dim + a) = aux_bounds[static_cast<std::size_t>(a)].second;
            }
            domain = stack(domain.with_extra_dims(k), Polyhedron::box(lower, upper));
        }
        B_hat = std::move(B_next);
        b_hat = std::move(b_next);

        pat.lambda_mat.emplace_back(std::move(lam_lo), std::move(lam_hi));
        pat.lambda_vec.emplace_back(Matrix(vec_lo), Matrix(vec_hi));
        pat.stars.push_back(std::move(stars));
        out.states.push_back(SymState{B_hat, b_hat, domain, domain.dim() - d0});
    }
    pat.first_star = pat.recompute_first_star();
    return out;
}

}  // namespace pwlip
