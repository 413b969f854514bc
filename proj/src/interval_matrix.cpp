#include "pwlip/interval_matrix.hpp"

#include "pwlip/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pwlip {

namespace {

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw Error(ErrorKind::InvalidInput, std::string(what) + " contains a non-finite entry");
    }
}

}  // namespace

IntervalMatrix::IntervalMatrix(Matrix lower, Matrix upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.rows() != upper_.rows() || lower_.cols() != upper_.cols()) {
        std::ostringstream msg;
        msg << "interval bounds differ in shape: " << lower_.rows() << "x" << lower_.cols()
            << " vs " << upper_.rows() << "x" << upper_.cols();
        throw Error(ErrorKind::Dimension, msg.str());
    }
    require_finite(lower_, "interval lower bound");
    require_finite(upper_, "interval upper bound");
    if ((lower_.array() > upper_.array()).any()) {
        throw Error(ErrorKind::InvalidInput, "interval lower bound exceeds upper bound");
    }
}

IntervalMatrix IntervalMatrix::exact(const Matrix& m) {
    require_finite(m, "matrix");
    IntervalMatrix out;
    out.lower_ = m;
    out.upper_ = m;
    return out;
}

bool IntervalMatrix::contains(const Matrix& m, double tol) const {
    if (m.rows() != rows() || m.cols() != cols()) return false;
    return ((m.array() >= lower_.array() - tol) && (m.array() <= upper_.array() + tol)).all();
}

void IntervalMatrix::set_row_exact(Eigen::Index r, const Eigen::RowVectorXd& values) {
    set_row(r, values, values);
}

void IntervalMatrix::set_row(Eigen::Index r, const Eigen::RowVectorXd& lo,
                             const Eigen::RowVectorXd& hi) {
    if (r < 0 || r >= rows() || lo.size() != cols() || hi.size() != cols()) {
        throw Error(ErrorKind::Dimension, "interval row update out of shape");
    }
    lower_.row(r) = lo;
    upper_.row(r) = hi;
}

IntervalMatrix interval_matmul(const IntervalMatrix& a, const IntervalMatrix& b) {
    if (a.cols() != b.rows()) {
        std::ostringstream msg;
        msg << "interval product inner dimensions differ: " << a.rows() << "x" << a.cols()
            << " times " << b.rows() << "x" << b.cols();
        throw Error(ErrorKind::Dimension, msg.str());
    }
    const Eigen::Index m = a.rows(), k = a.cols(), n = b.cols();
    Matrix lo = Matrix::Zero(m, n);
    Matrix hi = Matrix::Zero(m, n);
    const Matrix& al = a.lower();
    const Matrix& au = a.upper();
    const Matrix& bl = b.lower();
    const Matrix& bu = b.upper();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index t = 0; t < k; ++t) {
            const double b0 = bl(t, j), b1 = bu(t, j);
            if (b0 == 0.0 && b1 == 0.0) continue;
            for (Eigen::Index i = 0; i < m; ++i) {
                const double a0 = al(i, t), a1 = au(i, t);
                if (a0 == a1 && b0 == b1) {
                    const double p = a0 * b0;
                    lo(i, j) += p;
                    hi(i, j) += p;
                    continue;
                }
                const double p00 = a0 * b0, p01 = a0 * b1, p10 = a1 * b0, p11 = a1 * b1;
                lo(i, j) += std::min({p00, p01, p10, p11});
                hi(i, j) += std::max({p00, p01, p10, p11});
            }
        }
    }
    return IntervalMatrix(std::move(lo), std::move(hi));
}

Matrix abs_upper_envelope(const IntervalMatrix& j) {
    return j.lower().cwiseAbs().cwiseMax(j.upper().cwiseAbs());
}

IntervalMatrix hull(std::span<const Matrix> pieces) {
    if (pieces.empty()) throw Error(ErrorKind::InvalidInput, "hull of an empty piece set");
    Matrix lo = pieces.front();
    Matrix hi = pieces.front();
    for (const Matrix& p : pieces.subspan(1)) {
        if (p.rows() != lo.rows() || p.cols() != lo.cols()) {
            throw Error(ErrorKind::Dimension, "hull pieces differ in shape");
        }
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return IntervalMatrix(std::move(lo), std::move(hi));
}

IntervalMatrix hull(std::span<const Matrix> pieces, const IntervalMatrix& base,
                    std::span<const Eigen::Index> rows) {
    IntervalMatrix h = hull(pieces);
    if (h.rows() != base.rows() || h.cols() != base.cols()) {
        throw Error(ErrorKind::Dimension, "hull pieces differ in shape from the base interval");
    }
    IntervalMatrix out = base;
    for (Eigen::Index r : rows) out.set_row(r, h.lower().row(r), h.upper().row(r));
    return out;
}

}  // namespace pwlip
