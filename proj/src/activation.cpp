#include "pwlip/activation.hpp"

#include "pwlip/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace pwlip {

namespace {

std::string str(Eigen::Index v) { return std::to_string(static_cast<long long>(v)); }

void require_width(Eigen::Index w) {
    if (w <= 0) throw Error(ErrorKind::InvalidInput, "activation width must be positive");
}

/// Spline pieces for neuron n of a componentwise layer.
std::vector<NeuronPiece> spline_pieces(const Spline& s, Eigen::Index n, Eigen::Index width) {
    std::vector<NeuronPiece> out;
    const std::size_t k = s.slopes.size();
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<std::pair<double, double>> rows;  // (sign, bound): sign * x_n <= bound
        if (j > 0) rows.emplace_back(-1.0, -s.breakpoints[j - 1]);
        if (j + 1 < k) rows.emplace_back(1.0, s.breakpoints[j]);
        Matrix C = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), width);
        Vector c(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            C(r, n) = rows[r].first;
            c(r) = rows[r].second;
        }
        NeuronPiece piece{rows.empty() ? Polyhedron(width) : Polyhedron(std::move(C), std::move(c)),
                          {n}, Matrix::Zero(1, width), Vector::Constant(1, s.intercepts[j])};
        piece.T(0, n) = s.slopes[j];
        out.push_back(std::move(piece));
    }
    return out;
}

}  // namespace

std::string to_string(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::ReLU: return "relu";
        case ActivationKind::LeakyReLU: return "leaky_relu";
        case ActivationKind::PReLU: return "prelu";
        case ActivationKind::Spline: return "spline";
        case ActivationKind::GroupSort: return "groupsort";
        case ActivationKind::FullSort: return "fullsort";
        case ActivationKind::MaxMin: return "maxmin";
        case ActivationKind::MaxPool: return "maxpool";
        case ActivationKind::Identity: return "identity";
    }
    return "unknown";
}

Eigen::Index NeuronPiece::slot(Eigen::Index n) const {
    const auto it = std::lower_bound(fixed_neurons.begin(), fixed_neurons.end(), n);
    if (it == fixed_neurons.end() || *it != n) return -1;
    return static_cast<Eigen::Index>(it - fixed_neurons.begin());
}

// ---------------------------------------------------------------- Spline

void Spline::validate() const {
    if (slopes.empty()) throw Error(ErrorKind::InvalidInput, "spline needs at least one piece");
    if (intercepts.size() != slopes.size() || breakpoints.size() + 1 != slopes.size()) {
        throw Error(ErrorKind::InvalidInput,
                    "spline with " + std::to_string(slopes.size()) + " slopes needs as many intercepts and " +
                        std::to_string(slopes.size() - 1) + " breakpoints");
    }
    auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    if (!finite(breakpoints) || !finite(slopes) || !finite(intercepts)) {
        throw Error(ErrorKind::InvalidInput, "spline parameters must be finite");
    }
    for (std::size_t j = 0; j < breakpoints.size(); ++j) {
        if (j > 0 && !(breakpoints[j - 1] < breakpoints[j])) {
            throw Error(ErrorKind::InvalidInput, "spline breakpoints must be strictly increasing");
        }
        const double b = breakpoints[j];
        const double left = slopes[j] * b + intercepts[j];
        const double right = slopes[j + 1] * b + intercepts[j + 1];
        if (std::abs(left - right) > 1e-9 * (1.0 + std::abs(left))) {
            std::ostringstream msg;
            msg << "spline is discontinuous at breakpoint " << b << " (" << left << " vs " << right << ")";
            throw Error(ErrorKind::InvalidInput, msg.str());
        }
    }
}

double Spline::operator()(double x) const {
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    const auto j = static_cast<std::size_t>(it - breakpoints.begin());
    return slopes[j] * x + intercepts[j];
}

// ---------------------------------------------------------------- base

PwlActivation::PwlActivation(Eigen::Index in, Eigen::Index out) : in_(in), out_(out) {
    require_width(in);
    require_width(out);
}

void PwlActivation::set_decomposition(std::vector<std::vector<NeuronPiece>> groups,
                                      std::vector<Eigen::Index> group_of) {
    groups_ = std::move(groups);
    group_of_ = std::move(group_of);
    members_.assign(groups_.size(), {});
    for (Eigen::Index n = 0; n < out_; ++n) members_[static_cast<std::size_t>(group_of_[n])].push_back(n);
}

std::span<const NeuronPiece> PwlActivation::neuron_decomposition(Eigen::Index n) const {
    return group_pieces(group_of(n));
}

Eigen::Index PwlActivation::group_of(Eigen::Index n) const {
    if (n < 0 || n >= out_) {
        throw Error(ErrorKind::InvalidInput, "neuron index " + str(n) + " out of range [0, " + str(out_) + ")");
    }
    return group_of_[static_cast<std::size_t>(n)];
}

std::span<const NeuronPiece> PwlActivation::group_pieces(Eigen::Index g) const {
    return groups_.at(static_cast<std::size_t>(g));
}

const std::vector<Eigen::Index>& PwlActivation::group_members(Eigen::Index g) const {
    return members_.at(static_cast<std::size_t>(g));
}

// ---------------------------------------------------------------- componentwise

ComponentwiseActivation::ComponentwiseActivation(ActivationKind kind, std::vector<Spline> per_neuron)
    : PwlActivation(static_cast<Eigen::Index>(per_neuron.size()), static_cast<Eigen::Index>(per_neuron.size())),
      kind_(kind),
      splines_(std::move(per_neuron)) {
    const Eigen::Index d = input_width();
    std::vector<std::vector<NeuronPiece>> groups;
    std::vector<Eigen::Index> group_of(static_cast<std::size_t>(d));
    for (Eigen::Index n = 0; n < d; ++n) {
        splines_[static_cast<std::size_t>(n)].validate();
        groups.push_back(spline_pieces(splines_[static_cast<std::size_t>(n)], n, d));
        group_of[static_cast<std::size_t>(n)] = n;
    }
    set_decomposition(std::move(groups), std::move(group_of));
}

Vector ComponentwiseActivation::evaluate(const Vector& x) const {
    if (x.size() != input_width()) throw Error(ErrorKind::Dimension, "activation input has wrong width");
    Vector y(x.size());
    for (Eigen::Index n = 0; n < x.size(); ++n) y(n) = splines_[static_cast<std::size_t>(n)](x(n));
    return y;
}

double ComponentwiseActivation::lipschitz(const NormPair&) const {
    // Pieces are diagonal; every supported induced norm of a diagonal matrix
    // is its largest absolute entry.
    double best = 0.0;
    for (const Spline& s : splines_) {
        for (double a : s.slopes) best = std::max(best, std::abs(a));
    }
    return best;
}

// ---------------------------------------------------------------- groupsort

GroupSortActivation::GroupSortActivation(ActivationKind kind, Eigen::Index width, Eigen::Index group_size)
    : PwlActivation(width, width), kind_(kind), group_size_(group_size) {
    if (group_size < 1) throw Error(ErrorKind::InvalidInput, "group size must be positive");
    if (group_size > width) {
        throw Error(ErrorKind::InvalidInput,
                    "group size " + str(group_size) + " exceeds layer width " + str(width));
    }
    if (group_size > kMaxGroupSize) {
        throw Error(ErrorKind::Guardrail, "sorting group size " + str(group_size) + " exceeds the limit of " +
                                              str(kMaxGroupSize) + " (factorially many pieces)");
    }
    std::vector<std::vector<NeuronPiece>> groups;
    std::vector<Eigen::Index> group_of(static_cast<std::size_t>(width));
    for (Eigen::Index start = 0; start < width; start += group_size) {
        const Eigen::Index size = std::min(group_size, width - start);
        const Eigen::Index g = static_cast<Eigen::Index>(groups.size());
        std::vector<Eigen::Index> members(static_cast<std::size_t>(size));
        std::iota(members.begin(), members.end(), start);
        for (Eigen::Index m : members) group_of[static_cast<std::size_t>(m)] = g;

        std::vector<Eigen::Index> perm(static_cast<std::size_t>(size));
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        std::vector<NeuronPiece> pieces;
        do {
            // x_{perm[0]} <= x_{perm[1]} <= ... ; output k takes x_{perm[k]}.
            Matrix C = Matrix::Zero(size - 1, width);
            for (Eigen::Index k = 0; k + 1 < size; ++k) {
                C(k, start + perm[static_cast<std::size_t>(k)]) = 1.0;
                C(k, start + perm[static_cast<std::size_t>(k + 1)]) = -1.0;
            }
            NeuronPiece piece{size > 1 ? Polyhedron(std::move(C), Vector::Zero(size - 1)) : Polyhedron(width),
                              members, Matrix::Zero(size, width), Vector::Zero(size)};
            for (Eigen::Index k = 0; k < size; ++k) piece.T(k, start + perm[static_cast<std::size_t>(k)]) = 1.0;
            pieces.push_back(std::move(piece));
        } while (std::next_permutation(perm.begin(), perm.end()));
        groups.push_back(std::move(pieces));
    }
    set_decomposition(std::move(groups), std::move(group_of));
}

Vector GroupSortActivation::evaluate(const Vector& x) const {
    if (x.size() != input_width()) throw Error(ErrorKind::Dimension, "activation input has wrong width");
    Vector y = x;
    for (Eigen::Index start = 0; start < y.size(); start += group_size_) {
        const Eigen::Index size = std::min(group_size_, y.size() - start);
        std::sort(y.data() + start, y.data() + start + size);
    }
    return y;
}

double GroupSortActivation::lipschitz(const NormPair&) const { return 1.0; }

// ---------------------------------------------------------------- maxpool

MaxPoolActivation::MaxPoolActivation(Eigen::Index input_width, std::vector<std::vector<Eigen::Index>> windows)
    : PwlActivation(input_width, static_cast<Eigen::Index>(windows.size())), windows_(std::move(windows)) {
    std::vector<char> used(static_cast<std::size_t>(input_width), 0);
    std::vector<std::vector<NeuronPiece>> groups;
    std::vector<Eigen::Index> group_of;
    for (std::size_t w = 0; w < windows_.size(); ++w) {
        auto& win = windows_[w];
        if (win.empty()) throw Error(ErrorKind::InvalidInput, "maxpool window " + std::to_string(w) + " is empty");
        std::sort(win.begin(), win.end());
        for (Eigen::Index i : win) {
            if (i < 0 || i >= input_width) {
                throw Error(ErrorKind::InvalidInput, "maxpool window index " + str(i) + " out of range");
            }
            if (used[static_cast<std::size_t>(i)]) {
                throw Error(ErrorKind::InvalidInput, "maxpool windows overlap at input " + str(i));
            }
            used[static_cast<std::size_t>(i)] = 1;
        }
        const auto n = static_cast<Eigen::Index>(w);
        std::vector<NeuronPiece> pieces;
        for (Eigen::Index k : win) {
            // x_j - x_k <= 0 for every other j in the window.
            Matrix C = Matrix::Zero(static_cast<Eigen::Index>(win.size()) - 1, input_width);
            Eigen::Index r = 0;
            for (Eigen::Index j : win) {
                if (j == k) continue;
                C(r, j) = 1.0;
                C(r, k) = -1.0;
                ++r;
            }
            NeuronPiece piece{r > 0 ? Polyhedron(std::move(C), Vector::Zero(r)) : Polyhedron(input_width),
                              {n}, Matrix::Zero(1, input_width), Vector::Zero(1)};
            piece.T(0, k) = 1.0;
            pieces.push_back(std::move(piece));
        }
        groups.push_back(std::move(pieces));
        group_of.push_back(n);
    }
    set_decomposition(std::move(groups), std::move(group_of));
}

Vector MaxPoolActivation::evaluate(const Vector& x) const {
    if (x.size() != input_width()) throw Error(ErrorKind::Dimension, "activation input has wrong width");
    Vector y(output_width());
    for (std::size_t w = 0; w < windows_.size(); ++w) {
        double m = x(windows_[w].front());
        for (Eigen::Index i : windows_[w]) m = std::max(m, x(i));
        y(static_cast<Eigen::Index>(w)) = m;
    }
    return y;
}

double MaxPoolActivation::lipschitz(const NormPair&) const {
    // Selector rows with disjoint windows: at most one 1 per row and column.
    return 1.0;
}

// ---------------------------------------------------------------- identity

IdentityActivation::IdentityActivation(Eigen::Index width) : PwlActivation(width, width) {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(width));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    std::vector<std::vector<NeuronPiece>> groups(1);
    groups[0].push_back(NeuronPiece{Polyhedron(width), all, Matrix::Identity(width, width), Vector::Zero(width)});
    set_decomposition(std::move(groups), std::vector<Eigen::Index>(static_cast<std::size_t>(width), 0));
}

Vector IdentityActivation::evaluate(const Vector& x) const {
    if (x.size() != input_width()) throw Error(ErrorKind::Dimension, "activation input has wrong width");
    return x;
}

// ---------------------------------------------------------------- factories

ActivationPtr make_relu(Eigen::Index width) {
    require_width(width);
    return std::make_shared<ComponentwiseActivation>(
        ActivationKind::ReLU, std::vector<Spline>(static_cast<std::size_t>(width), Spline{{0.0}, {0.0, 1.0}, {0.0, 0.0}}));
}

ActivationPtr make_leaky_relu(Eigen::Index width, double slope) {
    require_width(width);
    return std::make_shared<ComponentwiseActivation>(
        ActivationKind::LeakyReLU,
        std::vector<Spline>(static_cast<std::size_t>(width), Spline{{0.0}, {slope, 1.0}, {0.0, 0.0}}));
}

ActivationPtr make_prelu(const std::vector<double>& slopes) {
    std::vector<Spline> splines;
    for (double a : slopes) splines.push_back(Spline{{0.0}, {a, 1.0}, {0.0, 0.0}});
    if (splines.empty()) throw Error(ErrorKind::InvalidInput, "prelu needs at least one slope");
    return std::make_shared<ComponentwiseActivation>(ActivationKind::PReLU, std::move(splines));
}

ActivationPtr make_spline(Eigen::Index width, Spline spline) {
    require_width(width);
    spline.validate();
    return std::make_shared<ComponentwiseActivation>(ActivationKind::Spline,
                                                     std::vector<Spline>(static_cast<std::size_t>(width), spline));
}

ActivationPtr make_groupsort(Eigen::Index width, Eigen::Index group_size) {
    return std::make_shared<GroupSortActivation>(ActivationKind::GroupSort, width, group_size);
}

ActivationPtr make_fullsort(Eigen::Index width) {
    return std::make_shared<GroupSortActivation>(ActivationKind::FullSort, width, width);
}

ActivationPtr make_maxmin(Eigen::Index width) {
    if (width < 2) throw Error(ErrorKind::InvalidInput, "maxmin needs width >= 2");
    return std::make_shared<GroupSortActivation>(ActivationKind::MaxMin, width, 2);
}

ActivationPtr make_maxpool(Eigen::Index input_width, std::vector<std::vector<Eigen::Index>> windows) {
    if (windows.empty()) throw Error(ErrorKind::InvalidInput, "maxpool needs at least one window");
    return std::make_shared<MaxPoolActivation>(input_width, std::move(windows));
}

ActivationPtr make_identity(Eigen::Index width) { return std::make_shared<IdentityActivation>(width); }

// ---------------------------------------------------------------- selection

PieceSelection select_pieces(const PwlActivation& act, const Vector& x, double tol) {
    if (x.size() != act.input_width()) throw Error(ErrorKind::Dimension, "activation input has wrong width");
    PieceSelection sel{Matrix::Zero(act.output_width(), act.input_width()), Vector::Zero(act.output_width()), false};
    for (Eigen::Index g = 0; g < act.num_groups(); ++g) {
        const NeuronPiece* chosen = nullptr;
        int hits = 0;
        for (const NeuronPiece& p : act.group_pieces(g)) {
            if (!p.region.contains(x, tol)) continue;
            ++hits;
            if (!chosen) chosen = &p;
        }
        if (!chosen) {
            // Coverage guarantees a containing piece; fall back to the least violated one.
            double best = std::numeric_limits<double>::infinity();
            for (const NeuronPiece& p : act.group_pieces(g)) {
                const double v = (p.region.constraint_matrix() * x - p.region.bound_vector()).maxCoeff();
                if (v < best) {
                    best = v;
                    chosen = &p;
                }
            }
            sel.near_boundary = true;
        }
        if (hits > 1) sel.near_boundary = true;
        for (std::size_t k = 0; k < chosen->fixed_neurons.size(); ++k) {
            const Eigen::Index n = chosen->fixed_neurons[k];
            sel.T.row(n) = chosen->T.row(static_cast<Eigen::Index>(k));
            sel.t(n) = chosen->t(static_cast<Eigen::Index>(k));
        }
    }
    return sel;
}

}  // namespace pwlip
