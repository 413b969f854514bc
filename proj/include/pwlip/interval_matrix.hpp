#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>

namespace pwlip {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Entrywise interval bounds [lower, upper] on a real matrix. Vectors are
/// stored as n x 1 interval matrices.
class IntervalMatrix {
public:
    IntervalMatrix() = default;
    /// Throws ErrorKind::Dimension on shape mismatch and InvalidInput if
    /// lower > upper somewhere or an entry is not finite.
    IntervalMatrix(Matrix lower, Matrix upper);

    /// Degenerate interval [m, m].
    static IntervalMatrix exact(const Matrix& m);

    const Matrix& lower() const noexcept { return lower_; }
    const Matrix& upper() const noexcept { return upper_; }
    Eigen::Index rows() const noexcept { return lower_.rows(); }
    Eigen::Index cols() const noexcept { return lower_.cols(); }

    bool is_degenerate() const { return lower_ == upper_; }
    bool contains(const Matrix& m, double tol = 0.0) const;

    /// Overwrite row `r` with the degenerate interval [values, values].
    void set_row_exact(Eigen::Index r, const Eigen::RowVectorXd& values);
    void set_row(Eigen::Index r, const Eigen::RowVectorXd& lo, const Eigen::RowVectorXd& hi);

private:
    Matrix lower_;
    Matrix upper_;
};

/// Sound product: every realization A' in a, B' in b has A'B' inside the result.
/// Each scalar product is the min/max of the four endpoint products.
IntervalMatrix interval_matmul(const IntervalMatrix& a, const IntervalMatrix& b);

/// U_ij = max(|lower_ij|, |upper_ij|).
Matrix abs_upper_envelope(const IntervalMatrix& j);

/// Entrywise min/max over `pieces`. With `rows` given, only those rows of
/// `base` are replaced by the hull; `base` supplies every other row.
IntervalMatrix hull(std::span<const Matrix> pieces);
IntervalMatrix hull(std::span<const Matrix> pieces, const IntervalMatrix& base,
                    std::span<const Eigen::Index> rows);

}  // namespace pwlip
