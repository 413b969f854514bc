#pragma once

#include "pwlip/interval_matrix.hpp"

#include <optional>

namespace pwlip {

/// Tolerance of the closed feasibility test: feasible iff some x has
/// C x <= c + kFeasTol.
inline constexpr double kFeasTol = 1e-9;
/// A polyhedron has an interior when it contains a ball of radius > kInteriorTol.
inline constexpr double kInteriorTol = 1e-9;

/// Half-space polyhedron {x in R^d : C x <= c}. Rows are normalized to unit
/// Euclidean length, trivially satisfied zero rows and exact duplicates are
/// dropped. Zero rows means the whole space R^d.
class Polyhedron {
public:
    explicit Polyhedron(Eigen::Index dim);
    Polyhedron(Matrix c_mat, Vector c_vec);

    static Polyhedron unconstrained(Eigen::Index dim) { return Polyhedron(dim); }
    /// Infinite bounds are omitted.
    static Polyhedron box(const Vector& lower, const Vector& upper);
    static Polyhedron hypercube(Eigen::Index dim, double lo, double hi);

    Eigen::Index dim() const noexcept { return dim_; }
    Eigen::Index num_constraints() const noexcept { return c_.size(); }
    bool unconstrained_space() const noexcept { return c_.size() == 0; }
    const Matrix& constraint_matrix() const noexcept { return C_; }
    const Vector& bound_vector() const noexcept { return c_; }

    bool contains(const Vector& x, double tol = kFeasTol) const;
    /// Pads `extra` unconstrained coordinates after the existing ones.
    Polyhedron with_extra_dims(Eigen::Index extra) const;

private:
    Eigen::Index dim_;
    Matrix C_;
    Vector c_;
};

/// P intersected with Q.
Polyhedron stack(const Polyhedron& p, const Polyhedron& q);

/// Closed test: faces and lower-dimensional sets count as non-empty.
bool is_feasible(const Polyhedron& p);
/// A point with C x <= c + kFeasTol, if one exists.
std::optional<Vector> feasible_point(const Polyhedron& p);

/// Radius of the largest inscribed ball, capped at 1; negative when empty.
double inscribed_radius(const Polyhedron& p);
/// Full-dimensional test used when matching activation pieces to regions.
bool has_interior(const Polyhedron& p);

struct LinearRange {
    double lo;
    double hi;
};

/// inf / sup of objective . x over P (possibly -inf / +inf).
/// Throws ErrorKind::Infeasible on an empty polyhedron.
LinearRange linear_bounds(const Polyhedron& p, const Vector& objective);

/// {x : J x + b in Q}.
Polyhedron affine_preimage(const Polyhedron& q, const Matrix& j, const Vector& b);

/// Per-coordinate bounds of P.
struct BoxBounds {
    Vector lower;
    Vector upper;
};
BoxBounds bounding_box(const Polyhedron& p);

}  // namespace pwlip
