#pragma once

// Dense two-phase tableau simplex with Bland's rule. Internal to the
// polyhedra module; callers go through pwlip/polyhedron.hpp.

#include "pwlip/interval_matrix.hpp"

namespace pwlip::detail {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    Vector x;
    /// Optimal phase-1 value (minus the total artificial infeasibility).
    double phase1 = 0.0;
};

/// maximize objective . x  subject to  a x <= rhs, x free.
/// Feasibility is decided with the phase-1 objective compared to -feas_tol.
/// Throws ErrorKind::SolverFailure when the pivot budget is exhausted.
LpSolution maximize(const Matrix& a, const Vector& rhs, const Vector& objective,
                    double feas_tol = 1e-10);

}  // namespace pwlip::detail
