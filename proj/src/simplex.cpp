#include "simplex.hpp"

#include "pwlip/error.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace pwlip::detail {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;
constexpr long kMaxPivots = 200000;

class Tableau {
public:
    Tableau(int rows, int cols) : m_(rows), n_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, -1) {}

    double& at(int i, int j) { return data_[static_cast<std::size_t>(i) * (n_ + 1) + j]; }
    double at(int i, int j) const { return data_[static_cast<std::size_t>(i) * (n_ + 1) + j]; }
    double& rhs(int i) { return at(i, n_); }
    double& cost(int j) { return at(m_, j); }
    double value() const { return at(m_, n_); }
    int rows() const { return m_; }
    int cols() const { return n_; }
    std::vector<int>& basis() { return basis_; }

    void pivot(int r, int c) {
        const double inv = 1.0 / at(r, c);
        for (int j = 0; j <= n_; ++j) at(r, j) *= inv;
        at(r, c) = 1.0;
        for (int i = 0; i <= m_; ++i) {
            if (i == r) continue;
            const double f = at(i, c);
            if (f == 0.0) continue;
            for (int j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
            at(i, c) = 0.0;
        }
        basis_[r] = c;
    }

    /// Installs "maximize weights . y" as the objective row in canonical form.
    void set_objective(const std::vector<double>& weights) {
        for (int j = 0; j <= n_; ++j) cost(j) = 0.0;
        for (int j = 0; j < n_; ++j) cost(j) = -weights[j];
        for (int i = 0; i < m_; ++i) {
            const double cb = weights[basis_[i]];
            if (cb == 0.0) continue;
            for (int j = 0; j <= n_; ++j) cost(j) += cb * at(i, j);
        }
    }

    /// Bland's rule: lowest-index improving column, ties in the ratio test go
    /// to the lowest basic variable index.
    LpStatus run(const std::vector<char>& allowed) {
        for (long iter = 0; iter < kMaxPivots; ++iter) {
            int enter = -1;
            for (int j = 0; j < n_; ++j) {
                if (!allowed[j] || cost(j) >= -kCostTol) continue;
                // reduced costs carry rounding proportional to the column scale
                double scale = 1.0;
                for (int i = 0; i < m_; ++i) scale = std::max(scale, std::abs(at(i, j)));
                if (cost(j) < -kCostTol * scale) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return LpStatus::Optimal;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                const double a = at(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = std::max(rhs(i), 0.0) / a;
                if (leave < 0 || ratio < best - 1e-14) {
                    leave = i;
                    best = ratio;
                } else if (ratio <= best + 1e-14 && basis_[i] < basis_[leave]) {
                    leave = i;
                    best = std::min(best, ratio);
                }
            }
            if (leave < 0) return LpStatus::Unbounded;
            pivot(leave, enter);
        }
        throw Error(ErrorKind::SolverFailure,
                    "simplex pivot budget exhausted (" + std::to_string(kMaxPivots) + " pivots)");
    }

private:
    int m_;
    int n_;
    std::vector<double> data_;
    std::vector<int> basis_;
};

}  // namespace

LpSolution maximize(const Matrix& a, const Vector& rhs, const Vector& objective, double feas_tol) {
    const int m = static_cast<int>(a.rows());
    const int d = static_cast<int>(a.cols());
    if (rhs.size() != m || objective.size() != d) {
        throw Error(ErrorKind::Dimension, "LP data shapes disagree");
    }
    LpSolution sol;
    if (m == 0) {
        sol.x = Vector::Zero(d);
        if (objective.cwiseAbs().maxCoeff() > 0.0) {
            sol.status = LpStatus::Unbounded;
            sol.value = std::numeric_limits<double>::infinity();
        } else {
            sol.status = LpStatus::Optimal;
        }
        return sol;
    }

    // Columns: u (d), v (d), slack (m), artificial (one per negative rhs row).
    int n_art = 0;
    for (int i = 0; i < m; ++i) n_art += rhs(i) < 0.0 ? 1 : 0;
    const int slack0 = 2 * d;
    const int art0 = slack0 + m;
    const int ncols = art0 + n_art;
    Tableau tab(m, ncols);
    int art = art0;
    for (int i = 0; i < m; ++i) {
        const double sign = rhs(i) < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < d; ++j) {
            tab.at(i, j) = sign * a(i, j);
            tab.at(i, d + j) = -sign * a(i, j);
        }
        tab.at(i, slack0 + i) = sign;
        tab.rhs(i) = sign * rhs(i);
        if (sign < 0.0) {
            tab.at(i, art) = 1.0;
            tab.basis()[i] = art++;
        } else {
            tab.basis()[i] = slack0 + i;
        }
    }

    std::vector<char> allowed(ncols, 1);
    if (n_art > 0) {
        std::vector<double> w(ncols, 0.0);
        for (int j = art0; j < ncols; ++j) w[j] = -1.0;
        tab.set_objective(w);
        tab.run(allowed);
        sol.phase1 = tab.value();
        if (sol.phase1 < -feas_tol) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        // Drive zero-level artificials out of the basis where possible.
        // Largest entry keeps the pivot stable; rows without one are redundant.
        for (int i = 0; i < m; ++i) {
            if (tab.basis()[i] < art0) continue;
            int col = -1;
            double big = 1e-9;
            for (int j = 0; j < art0; ++j) {
                if (std::abs(tab.at(i, j)) > big) {
                    big = std::abs(tab.at(i, j));
                    col = j;
                }
            }
            if (col >= 0) tab.pivot(i, col);
        }
        for (int j = art0; j < ncols; ++j) allowed[j] = 0;
    }

    std::vector<double> w(ncols, 0.0);
    for (int j = 0; j < d; ++j) {
        w[j] = objective(j);
        w[d + j] = -objective(j);
    }
    tab.set_objective(w);
    const LpStatus st = tab.run(allowed);

    Vector y = Vector::Zero(ncols);
    for (int i = 0; i < m; ++i) y(tab.basis()[i]) = tab.rhs(i);
    sol.x = y.head(d) - y.segment(d, d);
    sol.status = st;
    sol.value = st == LpStatus::Unbounded ? std::numeric_limits<double>::infinity() : objective.dot(sol.x);
    return sol;
}

}  // namespace pwlip::detail
