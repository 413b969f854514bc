#pragma once

#include "pwlip/norms.hpp"
#include "pwlip/polyhedron.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pwlip {

/// One polyhedral piece of a neuron: on `region` (a subset of the layer's
/// pre-activation space) the output rows listed in `fixed_neurons` equal
/// T x + t.
struct NeuronPiece {
    Polyhedron region;
    std::vector<Eigen::Index> fixed_neurons;  // sorted ascending
    Matrix T;                                  // fixed_neurons.size() x input width
    Vector t;

    /// Position of output neuron n within fixed_neurons, or -1.
    Eigen::Index slot(Eigen::Index n) const;
    Eigen::RowVectorXd row(Eigen::Index n) const { return T.row(slot(n)); }
    double bias(Eigen::Index n) const { return t(slot(n)); }
};

enum class ActivationKind { ReLU, LeakyReLU, PReLU, Spline, GroupSort, FullSort, MaxMin, MaxPool, Identity };

std::string to_string(ActivationKind kind);

/// Scalar continuous linear spline: slopes[j] x + intercepts[j] on the closed
/// interval between breakpoints[j-1] and breakpoints[j] (unbounded at the ends).
struct Spline {
    std::vector<double> breakpoints;
    std::vector<double> slopes;
    std::vector<double> intercepts;

    /// Throws ErrorKind::InvalidInput unless sizes agree, breakpoints strictly
    /// increase, values are finite and the pieces meet at every breakpoint.
    void validate() const;
    double operator()(double x) const;
};

/// A PWL activation layer with a per-neuron polyhedral decomposition.
///
/// Neurons are partitioned into groups; all neurons of a group share one
/// decomposition (for GroupSort a piece fixes the whole group). The union of
/// a group's piece regions covers the whole input space.
class PwlActivation {
public:
    virtual ~PwlActivation() = default;

    virtual ActivationKind kind() const = 0;
    virtual Vector evaluate(const Vector& x) const = 0;
    /// max over pieces of the piece norm.
    virtual double lipschitz(const NormPair& np) const = 0;

    Eigen::Index input_width() const noexcept { return in_; }
    Eigen::Index output_width() const noexcept { return out_; }

    std::span<const NeuronPiece> neuron_decomposition(Eigen::Index n) const;
    Eigen::Index group_of(Eigen::Index n) const;
    Eigen::Index num_groups() const noexcept { return static_cast<Eigen::Index>(groups_.size()); }
    std::span<const NeuronPiece> group_pieces(Eigen::Index g) const;
    /// Output neurons that belong to group g, ascending.
    const std::vector<Eigen::Index>& group_members(Eigen::Index g) const;

protected:
    PwlActivation(Eigen::Index in, Eigen::Index out);
    void set_decomposition(std::vector<std::vector<NeuronPiece>> groups, std::vector<Eigen::Index> group_of);

private:
    Eigen::Index in_;
    Eigen::Index out_;
    std::vector<std::vector<NeuronPiece>> groups_;
    std::vector<Eigen::Index> group_of_;
    std::vector<std::vector<Eigen::Index>> members_;
};

using ActivationPtr = std::shared_ptr<const PwlActivation>;

/// Componentwise spline; covers ReLU, LeakyReLU and PReLU.
class ComponentwiseActivation final : public PwlActivation {
public:
    ComponentwiseActivation(ActivationKind kind, std::vector<Spline> per_neuron);

    ActivationKind kind() const override { return kind_; }
    Vector evaluate(const Vector& x) const override;
    double lipschitz(const NormPair& np) const override;
    const Spline& spline(Eigen::Index n) const { return splines_.at(static_cast<std::size_t>(n)); }

private:
    ActivationKind kind_;
    std::vector<Spline> splines_;
};

/// Sorts consecutive groups of `group_size` entries ascending; a trailing
/// remainder group holds the leftover entries.
class GroupSortActivation final : public PwlActivation {
public:
    static constexpr Eigen::Index kMaxGroupSize = 7;

    GroupSortActivation(ActivationKind kind, Eigen::Index width, Eigen::Index group_size);

    ActivationKind kind() const override { return kind_; }
    Vector evaluate(const Vector& x) const override;
    double lipschitz(const NormPair& np) const override;
    Eigen::Index group_size() const noexcept { return group_size_; }

private:
    ActivationKind kind_;
    Eigen::Index group_size_;
};

/// Output n is the max over a window of input indices; windows are disjoint.
class MaxPoolActivation final : public PwlActivation {
public:
    MaxPoolActivation(Eigen::Index input_width, std::vector<std::vector<Eigen::Index>> windows);

    ActivationKind kind() const override { return ActivationKind::MaxPool; }
    Vector evaluate(const Vector& x) const override;
    double lipschitz(const NormPair& np) const override;
    const std::vector<std::vector<Eigen::Index>>& windows() const noexcept { return windows_; }

private:
    std::vector<std::vector<Eigen::Index>> windows_;
};

class IdentityActivation final : public PwlActivation {
public:
    explicit IdentityActivation(Eigen::Index width);

    ActivationKind kind() const override { return ActivationKind::Identity; }
    Vector evaluate(const Vector& x) const override;
    double lipschitz(const NormPair&) const override { return 1.0; }
};

ActivationPtr make_relu(Eigen::Index width);
ActivationPtr make_leaky_relu(Eigen::Index width, double slope);
ActivationPtr make_prelu(const std::vector<double>& slopes);
ActivationPtr make_spline(Eigen::Index width, Spline spline);
ActivationPtr make_groupsort(Eigen::Index width, Eigen::Index group_size);
ActivationPtr make_fullsort(Eigen::Index width);
ActivationPtr make_maxmin(Eigen::Index width);
ActivationPtr make_maxpool(Eigen::Index input_width, std::vector<std::vector<Eigen::Index>> windows);
ActivationPtr make_identity(Eigen::Index width);

/// Evaluates through the pieces: for each group the lowest-index piece whose
/// region contains x (within `tol`) is used.
struct PieceSelection {
    Matrix T;            // output width x input width
    Vector t;
    bool near_boundary;  // x lies within tol of a second piece of some group
};
PieceSelection select_pieces(const PwlActivation& act, const Vector& x, double tol);

}  // namespace pwlip
