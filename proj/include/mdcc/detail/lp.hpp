#pragma once

#include "mdcc/channel.hpp"

namespace mdcc::detail {

struct LpResult {
  bool feasible = false;
  bool bounded = true;
  Vector x;
  double value = 0.0;
};

/// Minimizes c'x subject to Ax = b, x >= 0 with a dense two-phase simplex
/// method under Bland's rule (deterministic, cycle-free). feas_tol bounds the
/// residual infeasibility accepted at the end of phase one.
LpResult lp_solve(const Matrix& A, const Vector& b, const Vector& c, double feas_tol = 1e-10);

/// Among the optima of min c'x s.t. Ax = b, x >= 0, returns the
/// lexicographically smallest point: coordinates are minimized in index order,
/// each within tie_tol of the previously attained optimum.
LpResult lp_lexicographic_min(const Matrix& A, const Vector& b, const Vector& c,
                              double feas_tol = 1e-10, double tie_tol = 1e-11);

}  // namespace mdcc::detail
