#include "pwlip/polyhedron.hpp"

#include "pwlip/error.hpp"
#include "simplex.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace pwlip {

namespace {

constexpr double kZeroRowTol = 1e-13;

std::string dims(Eigen::Index a, Eigen::Index b) {
    std::ostringstream s;
    s << a << " vs " << b;
    return s.str();
}

}  // namespace

Polyhedron::Polyhedron(Eigen::Index dim) : dim_(dim), C_(0, dim), c_(0) {
    if (dim <= 0) throw Error(ErrorKind::Dimension, "polyhedron dimension must be positive");
}

Polyhedron::Polyhedron(Matrix c_mat, Vector c_vec) : dim_(c_mat.cols()) {
    if (dim_ <= 0) throw Error(ErrorKind::Dimension, "polyhedron dimension must be positive");
    if (c_mat.rows() != c_vec.size()) {
        throw Error(ErrorKind::Dimension,
                    "constraint rows and bounds differ: " + dims(c_mat.rows(), c_vec.size()));
    }
    if (!c_mat.allFinite() || !c_vec.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "polyhedron constraints must be finite");
    }
    std::vector<Eigen::Index> keep;
    keep.reserve(c_mat.rows());
    bool infeasible_marker = false;
    for (Eigen::Index i = 0; i < c_mat.rows(); ++i) {
        const double n = c_mat.row(i).norm();
        if (n < kZeroRowTol) {
            // 0 <= c_i: either vacuous or contradictory.
            if (c_vec(i) < -kFeasTol) infeasible_marker = true;
            continue;
        }
        c_mat.row(i) /= n;
        c_vec(i) /= n;
        bool dup = false;
        for (Eigen::Index k : keep) {
            if (c_vec(k) == c_vec(i) && c_mat.row(k) == c_mat.row(i)) {
                dup = true;
                break;
            }
        }
        if (!dup) keep.push_back(i);
    }
    const Eigen::Index m = static_cast<Eigen::Index>(keep.size()) + (infeasible_marker ? 1 : 0);
    C_ = Matrix::Zero(m, dim_);
    c_ = Vector::Zero(m);
    for (std::size_t r = 0; r < keep.size(); ++r) {
        C_.row(r) = c_mat.row(keep[r]);
        c_(r) = c_vec(keep[r]);
    }
    if (infeasible_marker) c_(m - 1) = -1.0;
}

Polyhedron Polyhedron::box(const Vector& lower, const Vector& upper) {
    if (lower.size() != upper.size()) {
        throw Error(ErrorKind::Dimension, "box bounds differ in length: " + dims(lower.size(), upper.size()));
    }
    const Eigen::Index d = lower.size();
    std::vector<std::pair<Eigen::Index, double>> rows;  // (coordinate*2 + side, bound)
    for (Eigen::Index i = 0; i < d; ++i) {
        if (std::isnan(lower(i)) || std::isnan(upper(i))) {
            throw Error(ErrorKind::InvalidInput, "box bound is NaN");
        }
        if (lower(i) > upper(i)) throw Error(ErrorKind::InvalidInput, "box lower bound exceeds upper bound");
        if (std::isfinite(upper(i))) rows.emplace_back(2 * i, upper(i));
        if (std::isfinite(lower(i))) rows.emplace_back(2 * i + 1, -lower(i));
    }
    Matrix C = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), d);
    Vector c(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto [key, bound] = rows[r];
        C(r, key / 2) = key % 2 == 0 ? 1.0 : -1.0;
        c(r) = bound;
    }
    if (d == 0) throw Error(ErrorKind::Dimension, "polyhedron dimension must be positive");
    return rows.empty() ? Polyhedron(d) : Polyhedron(std::move(C), std::move(c));
}

Polyhedron Polyhedron::hypercube(Eigen::Index dim, double lo, double hi) {
    return box(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

bool Polyhedron::contains(const Vector& x, double tol) const {
    if (x.size() != dim_) throw Error(ErrorKind::Dimension, "point dimension " + dims(x.size(), dim_));
    if (c_.size() == 0) return true;
    return ((C_ * x - c_).array() <= tol).all();
}

Polyhedron Polyhedron::with_extra_dims(Eigen::Index extra) const {
    if (extra == 0) return *this;
    Polyhedron out(dim_ + extra);
    out.C_ = Matrix::Zero(C_.rows(), dim_ + extra);
    out.C_.leftCols(dim_) = C_;
    out.c_ = c_;
    return out;
}

Polyhedron stack(const Polyhedron& p, const Polyhedron& q) {
    if (p.dim() != q.dim()) {
        throw Error(ErrorKind::Dimension, "stacking polyhedra of dimension " + dims(p.dim(), q.dim()));
    }
    if (q.unconstrained_space()) return p;
    if (p.unconstrained_space()) return q;
    Matrix C(p.num_constraints() + q.num_constraints(), p.dim());
    C << p.constraint_matrix(), q.constraint_matrix();
    Vector c(C.rows());
    c << p.bound_vector(), q.bound_vector();
    return Polyhedron(std::move(C), std::move(c));
}

std::optional<Vector> feasible_point(const Polyhedron& p) {
    if (p.unconstrained_space()) return Vector::Zero(p.dim());
    const Vector relaxed = p.bound_vector().array() + kFeasTol;
    const auto sol = detail::maximize(p.constraint_matrix(), relaxed, Vector::Zero(p.dim()));
    if (sol.status == detail::LpStatus::Infeasible) return std::nullopt;
    return sol.x;
}

bool is_feasible(const Polyhedron& p) { return feasible_point(p).has_value(); }

double inscribed_radius(const Polyhedron& p) {
    if (p.unconstrained_space()) return 1.0;
    const Eigen::Index m = p.num_constraints(), d = p.dim();
    // maximize t  s.t.  C x + t <= c (unit rows),  t <= 1
    Matrix a = Matrix::Zero(m + 1, d + 1);
    a.topLeftCorner(m, d) = p.constraint_matrix();
    a.col(d).head(m).setOnes();
    a(m, d) = 1.0;
    Vector rhs(m + 1);
    rhs << p.bound_vector(), 1.0;
    Vector obj = Vector::Zero(d + 1);
    obj(d) = 1.0;
    const auto sol = detail::maximize(a, rhs, obj);
    if (sol.status != detail::LpStatus::Optimal) {
        throw Error(ErrorKind::SolverFailure, "inscribed-ball LP did not reach an optimum");
    }
    return sol.value;
}

bool has_interior(const Polyhedron& p) { return inscribed_radius(p) > kInteriorTol; }

LinearRange linear_bounds(const Polyhedron& p, const Vector& objective) {
    if (objective.size() != p.dim()) {
        throw Error(ErrorKind::Dimension, "objective dimension " + dims(objective.size(), p.dim()));
    }
    const auto hi = detail::maximize(p.constraint_matrix(), p.bound_vector(), objective);
    if (hi.status == detail::LpStatus::Infeasible) {
        throw Error(ErrorKind::Infeasible, "linear bounds requested over an empty polyhedron");
    }
    const auto lo = detail::maximize(p.constraint_matrix(), p.bound_vector(), -objective);
    if (lo.status == detail::LpStatus::Infeasible) {
        throw Error(ErrorKind::Infeasible, "linear bounds requested over an empty polyhedron");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {lo.status == detail::LpStatus::Unbounded ? -inf : -lo.value,
            hi.status == detail::LpStatus::Unbounded ? inf : hi.value};
}

Polyhedron affine_preimage(const Polyhedron& q, const Matrix& j, const Vector& b) {
    if (j.rows() != q.dim() || b.size() != q.dim()) {
        throw Error(ErrorKind::Dimension,
                    "affine map output " + dims(j.rows(), q.dim()) + " (bias " + std::to_string(b.size()) + ")");
    }
    if (j.cols() <= 0) throw Error(ErrorKind::Dimension, "affine map has no input columns");
    if (q.unconstrained_space()) return Polyhedron(j.cols());
    return Polyhedron(q.constraint_matrix() * j, q.bound_vector() - q.constraint_matrix() * b);
}

BoxBounds bounding_box(const Polyhedron& p) {
    BoxBounds box{Vector(p.dim()), Vector(p.dim())};
    for (Eigen::Index i = 0; i < p.dim(); ++i) {
        const auto r = linear_bounds(p, Vector::Unit(p.dim(), i));
        box.lower(i) = r.lo;
        box.upper(i) = r.hi;
    }
    return box;
}

}  // namespace pwlip
