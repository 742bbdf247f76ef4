#include "mdcc/detail/lp.hpp"

#include <cmath>
#include <vector>

namespace mdcc::detail {

namespace {

constexpr double kPivotTol = 1e-11;

// Tableau in canonical form: rows 0..m-1 are constraints, row m is the
// reduced-cost row; column ncols is the right-hand side.
struct Tableau {
  Matrix t;
  std::vector<Index> basis;
  Index m, ncols;

  double rhs(Index r) const { return t(r, ncols); }

  void pivot(Index row, Index col) {
    t.row(row) /= t(row, col);
    for (Index r = 0; r <= m; ++r) {
      if (r == row) continue;
      const double factor = t(r, col);
      if (factor != 0.0) t.row(r) -= factor * t.row(row);
    }
    basis[static_cast<std::size_t>(row)] = col;
  }

  // Bland's rule: entering = lowest-index column with negative reduced cost,
  // leaving = min-ratio row with lowest basis index on ties.
  // Returns false when optimal, throws nothing; sets unbounded on failure.
  bool step(Index allowed_cols, bool* unbounded) {
    Index enter = -1;
    for (Index j = 0; j < allowed_cols; ++j) {
      if (t(m, j) < -kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return false;
    Index leave = -1;
    double best_ratio = 0.0;
    for (Index r = 0; r < m; ++r) {
      const double a = t(r, enter);
      if (a > kPivotTol) {
        const double ratio = rhs(r) / a;
        if (leave < 0 || ratio < best_ratio - kPivotTol ||
            (std::abs(ratio - best_ratio) <= kPivotTol &&
             basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
          leave = r;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) {
      *unbounded = true;
      return false;
    }
    pivot(leave, enter);
    return true;
  }
};

}  // namespace

LpResult lp_solve(const Matrix& A, const Vector& b, const Vector& c, double feas_tol) {
  const Index m = A.rows();
  const Index n = A.cols();
  LpResult result;

  // Phase 1 tableau: columns [x | artificials | rhs].
  Tableau tab;
  tab.m = m;
  tab.ncols = n + m;
  tab.t = Matrix::Zero(m + 1, tab.ncols + 1);
  tab.basis.resize(static_cast<std::size_t>(m));
  for (Index r = 0; r < m; ++r) {
    const double sign = b[r] < 0.0 ? -1.0 : 1.0;
    tab.t.block(r, 0, 1, n) = sign * A.row(r);
    tab.t(r, n + r) = 1.0;
    tab.t(r, tab.ncols) = sign * b[r];
    tab.basis[static_cast<std::size_t>(r)] = n + r;
  }
  // Phase-1 costs: one per artificial; canonicalize against the basis.
  for (Index j = 0; j < m; ++j) tab.t(m, n + j) = 1.0;
  for (Index r = 0; r < m; ++r) tab.t.row(m) -= tab.t.row(r);

  bool unbounded = false;
  while (tab.step(tab.ncols, &unbounded)) {
  }
  const double infeasibility = -tab.t(m, tab.ncols);
  if (infeasibility > feas_tol) {
    result.feasible = false;
    return result;
  }

  // Drive leftover artificials out of the basis where possible; rows that
  // cannot pivot are redundant and stay with a zero artificial.
  for (Index r = 0; r < m; ++r) {
    if (tab.basis[static_cast<std::size_t>(r)] >= n) {
      for (Index j = 0; j < n; ++j) {
        if (std::abs(tab.t(r, j)) > 1e-9) {
          tab.pivot(r, j);
          break;
        }
      }
    }
  }

  // Phase 2: real costs, artificial columns frozen out of the pricing loop.
  tab.t.row(m).setZero();
  for (Index j = 0; j < n; ++j) tab.t(m, j) = c[j];
  for (Index r = 0; r < m; ++r) {
    const Index bi = tab.basis[static_cast<std::size_t>(r)];
    if (bi < n && c[bi] != 0.0) tab.t.row(m) -= c[bi] * tab.t.row(r);
  }
  while (tab.step(n, &unbounded)) {
  }
  if (unbounded) {
    result.feasible = true;
    result.bounded = false;
    return result;
  }

  result.feasible = true;
  result.x = Vector::Zero(n);
  for (Index r = 0; r < m; ++r) {
    const Index bi = tab.basis[static_cast<std::size_t>(r)];
    if (bi < n) result.x[bi] = std::max(0.0, tab.rhs(r));
  }
  result.value = c.dot(result.x);
  return result;
}

LpResult lp_lexicographic_min(const Matrix& A, const Vector& b, const Vector& c,
                              double feas_tol, double tie_tol) {
  LpResult base = lp_solve(A, b, c, feas_tol);
  if (!base.feasible || !base.bounded) return base;

  const Index m = A.rows();
  const Index n = A.cols();

  // Augmented system: original equalities plus one slack row per pinned
  // "<=" constraint (objective value first, then each coordinate in turn).
  const Index rows = m + n + 1;
  Matrix aug = Matrix::Zero(rows, n + n + 1);
  Vector rhs = Vector::Zero(rows);
  aug.block(0, 0, m, n) = A;
  rhs.head(m) = b;
  aug.block(m, 0, 1, n) = c.transpose();
  aug(m, n) = 1.0;  // slack for c'x <= value + tie_tol
  rhs[m] = base.value + tie_tol;

  Index used_rows = m + 1;
  Vector best = base.x;
  for (Index k = 0; k < n; ++k) {
    Vector obj = Vector::Zero(n + n + 1);
    obj[k] = 1.0;
    const LpResult step = lp_solve(aug.topRows(used_rows), rhs.head(used_rows), obj, feas_tol);
    if (!step.feasible || !step.bounded) break;
    best = step.x.head(n);
    if (k + 1 < n) {
      aug(used_rows, k) = 1.0;
      aug(used_rows, n + 1 + k) = 1.0;  // slack for x_k <= min + tie_tol
      rhs[used_rows] = step.value + tie_tol;
      ++used_rows;
    }
  }
  LpResult result;
  result.feasible = true;
  result.bounded = true;
  result.x = best;
  result.value = c.dot(best);
  return result;
}

}  // namespace mdcc::detail
