#include "mdcc/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdcc/capacity.hpp"
#include "mdcc/detail/parallel.hpp"
#include "mdcc/detail/simplex.hpp"
#include "mdcc/errors.hpp"
#include "mdcc/gallager.hpp"
#include "mdcc/measures.hpp"

namespace mdcc {

namespace {

bool lex_less(const Vector& a, const Vector& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

// Convex surrogate for the inner maximization: G(P) = sum_y f_y^{1+rho},
// so E_o = -log G and maximizing E_o is minimizing G.
struct Surrogate {
  Matrix B;  // B(x,y) = W(y|x)^{1/(1+rho)}
  double r1;

  double value(const Vector& p) const {
    double total = 0.0;
    for (Index y = 0; y < B.cols(); ++y) {
      const double fy = B.col(y).dot(p);
      if (fy > 0.0) total += std::pow(fy, r1);
    }
    return total;
  }

  Vector gradient(const Vector& p) const {
    Vector g = Vector::Zero(B.rows());
    for (Index y = 0; y < B.cols(); ++y) {
      const double fy = B.col(y).dot(p);
      if (fy > 0.0) g += r1 * std::pow(fy, r1 - 1.0) * B.col(y);
    }
    return g;
  }
};

// Projected gradient descent with Armijo backtracking; the Frank-Wolfe gap
// certifies optimality of the convex problem.
Vector minimize_surrogate(const Surrogate& s, Vector p, double tol, long max_iters,
                          double* gap_out) {
  double value = s.value(p);
  double step = 1.0;
  double gap = std::numeric_limits<double>::infinity();
  for (long it = 0; it < max_iters; ++it) {
    const Vector grad = s.gradient(p);
    gap = grad.dot(p) - grad.minCoeff();
    if (gap <= tol * std::max(value, 1e-300)) break;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Vector cand = detail::project_to_simplex(p - step * grad);
      const double cand_value = s.value(cand);
      if (cand_value < value - 1e-4 * grad.dot(p - cand)) {
        p = cand;
        value = cand_value;
        step *= 1.3;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // step underflow: as converged as doubles allow
  }
  if (gap_out) *gap_out = gap;
  return p;
}

struct RhoObjective {
  const Channel& w;
  double R;
  double tol;
  long max_iters;

  // phi(rho) = max_P E_o(rho, P) - rho R, with the maximizing P.
  double operator()(double rho, InputDistribution* argmax = nullptr) const {
    auto [p, value] = max_eo_over_p(rho, w, tol, max_iters);
    if (argmax) *argmax = std::move(p);
    return value - rho * R;
  }

  // One-sided derivative through the optimizer (Danskin).
  double slope(double rho) const {
    InputDistribution p;
    (*this)(rho, &p);
    return eo_derivatives(rho, p, w).d1 - R;
  }
};

struct OuterResult {
  double rho_star = 0.0;
  double value = 0.0;
  InputDistribution P_star;
};

// Outer maximization of phi over [0, hi]: grid scan (linear plus log-spaced
// points near zero, where the optimizer lives at rates close to capacity),
// then slope bisection inside the bracket around the best grid point, with a
// golden-section fallback when the slope does not change sign there.
OuterResult maximize_over_rho(const RhoObjective& phi, double hi, double width_tol,
                              int grid_density, bool audit, double audit_step) {
  std::vector<double> grid;
  grid.push_back(0.0);
  if (audit) {
    for (double r = audit_step; r < hi; r += audit_step) grid.push_back(r);
  } else {
    for (int i = 1; i < grid_density; ++i) {
      grid.push_back(hi * static_cast<double>(i) / (grid_density - 1));
    }
    for (double r = 1e-6; r < hi; r *= 4.0) grid.push_back(r);
  }
  grid.push_back(hi);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> values(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) { values[i] = phi(grid[i]); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }

  const double lo = best > 0 ? grid[best - 1] : grid[best];
  const double up = best + 1 < grid.size() ? grid[best + 1] : grid[best];

  double rho_star = grid[best];
  const double slo = best > 0 ? phi.slope(lo) : phi.slope(0.0);
  if (best == 0 && slo <= 0.0) {
    rho_star = 0.0;
  } else {
    const double sup = phi.slope(up);
    if (sup >= 0.0) {
      rho_star = up;
    } else if (slo <= 0.0 && best > 0) {
      // Slope already negative on the left edge: descend within [lo, grid[best]].
      double a = lo;
      double b = grid[best];
      for (int it = 0; it < 90 && b - a > width_tol; ++it) {
        const double mid = 0.5 * (a + b);
        if (phi.slope(mid) > 0.0) {
          a = mid;
        } else {
          b = mid;
        }
      }
      rho_star = 0.5 * (a + b);
    } else {
      double a = lo;
      double b = up;
      for (int it = 0; it < 90 && b - a > width_tol; ++it) {
        const double mid = 0.5 * (a + b);
        if (phi.slope(mid) > 0.0) {
          a = mid;
        } else {
          b = mid;
        }
      }
      rho_star = 0.5 * (a + b);
    }
  }

  // Non-unimodal safety net: a golden-section pass over the same bracket.
  double gl = lo;
  double gu = up;
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = gu - kInvPhi * (gu - gl);
  double x2 = gl + kInvPhi * (gu - gl);
  double f1 = phi(x1);
  double f2 = phi(x2);
  for (int it = 0; it < 90 && gu - gl > width_tol; ++it) {
    if (f1 < f2) {
      gl = x1;
      x1 = x2;
      f1 = f2;
      x2 = gl + kInvPhi * (gu - gl);
      f2 = phi(x2);
    } else {
      gu = x2;
      x2 = x1;
      f2 = f1;
      x1 = gu - kInvPhi * (gu - gl);
      f1 = phi(x1);
    }
  }

  const double cands[3] = {rho_star, 0.5 * (gl + gu), grid[best]};
  OuterResult out;
  out.value = -std::numeric_limits<double>::infinity();
  for (double cand : cands) {
    InputDistribution p;
    const double v = phi(cand, &p);
    if (v > out.value) {
      out.value = v;
      out.rho_star = cand;
      out.P_star = std::move(p);
    }
  }
  return out;
}

double width_tolerance(double tol) { return std::clamp(tol, 1e-13, 1e-3); }

}  // namespace

std::pair<InputDistribution, double> max_eo_over_p(double rho, const Channel& w, double tol,
                                                   long max_iters) {
  if (!(rho >= 0.0)) throw NegativeRho("rho must be nonnegative");
  const Index k = w.input_size();
  if (rho == 0.0) return {uniform_input(k), 0.0};

  Surrogate s;
  s.r1 = 1.0 + rho;
  s.B.resize(k, w.output_size());
  for (Index x = 0; x < k; ++x) {
    for (Index y = 0; y < w.output_size(); ++y) {
      const double wxy = w.probabilities(x, y);
      s.B(x, y) = wxy > 0.0 ? std::pow(wxy, 1.0 / s.r1) : 0.0;
    }
  }

  std::vector<Vector> starts;
  starts.push_back(Vector::Constant(k, 1.0 / static_cast<double>(k)));
  for (Index x = 0; x < k; ++x) starts.push_back(Vector::Unit(k, x));

  std::vector<Vector> candidates;
  std::vector<double> gaps;
  candidates.reserve(starts.size());
  for (const Vector& start : starts) {
    double gap = 0.0;
    candidates.push_back(minimize_surrogate(s, start, tol, max_iters, &gap));
    gaps.push_back(gap);
  }

  std::size_t best = 0;
  double best_g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double g = s.value(candidates[i]);
    if (g < best_g) {
      best_g = g;
      best = i;
    }
  }
  // The reachable duality-gap floor grows with the surrogate curvature, so
  // the acceptance threshold carries a (1+rho)^2 allowance. The certified
  // value error stays gaps[best]/best_g, orders below every consumer's
  // tolerance in the large-rho regime.
  const double gap_allowance = std::max(64.0, (1.0 + rho) * (1.0 + rho));
  if (!(gaps[best] <= gap_allowance * tol * std::max(best_g, 1e-300))) {
    throw NoConvergence("input-distribution optimizer missed its duality gap at rho " +
                            std::to_string(rho),
                        gaps[best]);
  }

  // Lexicographic tie-break among converged candidates near the best value.
  const double best_value = -std::log(best_g);
  Vector chosen = candidates[best];
  for (const Vector& cand : candidates) {
    if (-std::log(s.value(cand)) >= best_value - 1e-9 && lex_less(cand, chosen)) chosen = cand;
  }
  return {normalized_input(chosen), -std::log(s.value(chosen))};
}

ExponentPoint err_exponent(double R, const Channel& w, double tol, const ExponentOptions& opt) {
  if (!(R >= 0.0)) throw DomainError("rate must be nonnegative");
  RhoObjective phi{w, R, opt.inner_tol, opt.max_inner_iters};
  const OuterResult best = maximize_over_rho(phi, 1.0, width_tolerance(tol),
                                             opt.grid_density, opt.audit, opt.audit_step);

  ExponentPoint point;
  point.R = R;
  point.E_r = std::max(0.0, best.value);
  point.rho_star_r = best.rho_star;
  point.P_star = best.P_star;
  if (best.rho_star > 1e-12 && best.rho_star < 1.0 - 1e-12) {
    point.stationarity_residual =
        std::abs(eo_derivatives(best.rho_star, best.P_star, w).d1 - R);
  }
  return point;
}

ExponentPoint esp_exponent(double R, const Channel& w, double tol, const ExponentOptions& opt) {
  if (!(R >= 0.0)) throw DomainError("rate must be nonnegative");
  RhoObjective phi{w, R, opt.inner_tol, opt.max_inner_iters};

  ExponentPoint point;
  point.R = R;

  // The objective still climbing at rho_max marks the R <= R_inf regime.
  if (phi.slope(opt.rho_max) > 0.0) {
    point.esp_finite = false;
    point.E_SP = std::numeric_limits<double>::infinity();
    point.rho_star_sp = opt.rho_max;
    phi(opt.rho_max, &point.P_star);
    return point;
  }

  const OuterResult best = maximize_over_rho(phi, opt.rho_max, width_tolerance(tol),
                                             opt.grid_density, opt.audit, opt.audit_step);
  point.P_star = best.P_star;
  point.rho_star_sp = best.rho_star;
  point.esp_finite = true;
  point.E_SP = std::max(0.0, best.value);
  if (best.rho_star > 1e-12 && best.rho_star < opt.rho_max - 1e-12) {
    point.stationarity_residual =
        std::abs(eo_derivatives(best.rho_star, best.P_star, w).d1 - R);
  }
  return point;
}

double esp_haroutunian(double R, const Channel& w, const InputDistribution& p, double tol) {
  if (w.input_size() > 4 || w.output_size() > 4) {
    throw AlphabetTooLarge("esp_haroutunian is an oracle for alphabets of size at most 4");
  }
  if (!(R >= 0.0)) throw DomainError("rate must be nonnegative");

  const Index k = w.input_size();
  const Index m = w.output_size();
  const TestChannel wt = as_test_channel(w);
  if (mutual_information(p, wt) <= R) return 0.0;  // V = W feasible

  const auto pack = [](const Matrix& v) { return TestChannel{v}; };

  // Quadratic penalty on the mutual-information constraint. D(V||W|P) keeps
  // V absolutely continuous w.r.t. W on the support of P; rows outside the
  // support never matter and stay at W.
  const auto objective = [&](const Matrix& v, double mu) {
    const TestChannel tv = pack(v);
    const double d = conditional_kl(tv, w, p);
    if (!std::isfinite(d)) return d;
    const double slack = mutual_information(p, tv) - R;
    return d + (slack > 0.0 ? mu * slack * slack : 0.0);
  };

  const auto grad = [&](const Matrix& v, double mu) {
    const TestChannel tv = pack(v);
    const Vector q = output_distribution(p, tv);
    const double slack = mutual_information(p, tv) - R;
    const double pen = slack > 0.0 ? 2.0 * mu * slack : 0.0;
    Matrix g = Matrix::Zero(k, m);
    for (Index x : p.support) {
      for (Index y = 0; y < m; ++y) {
        const double vxy = v(x, y);
        const double wxy = w.probabilities(x, y);
        if (vxy > 0.0 && wxy > 0.0) {
          g(x, y) =
              p.weights[x] * ((std::log(vxy / wxy) + 1.0) + pen * std::log(vxy / q[y]));
        }
      }
    }
    return g;
  };

  std::vector<Matrix> starts;
  starts.push_back(w.probabilities);
  {
    // Rank-one starts (every row a common output distribution) and blends.
    Matrix v(k, m);
    const Vector q = output_distribution(p, wt);
    for (Index x = 0; x < k; ++x) v.row(x) = q.transpose();
    starts.push_back(v);
    const Matrix u = Matrix::Constant(k, m, 1.0 / static_cast<double>(m));
    starts.push_back(u);
    starts.push_back(0.5 * (w.probabilities + u));
  }

  double best = std::numeric_limits<double>::infinity();
  for (const Matrix& start : starts) {
    Matrix v = start;
    for (Index x : p.support) {
      for (Index y = 0; y < m; ++y) {
        if (w.probabilities(x, y) == 0.0) v(x, y) = 0.0;
      }
      const double sum = v.row(x).sum();
      if (sum <= 0.0) {
        v.row(x) = w.probabilities.row(x);
      } else {
        v.row(x) /= sum;
      }
    }
    // The ladder reaches 1e14 because at R = 0 the constraint multiplier is
    // unbounded and the slack only shrinks like mu^{-2/3}.
    for (double mu : {1e2, 1e4, 1e6, 1e8, 1e10, 1e12, 1e14}) {
      double step = 0.5;
      double value = objective(v, mu);
      for (long it = 0; it < 5000; ++it) {
        const Matrix g = grad(v, mu);
        Matrix cand = v;
        bool moved = false;
        for (int ls = 0; ls < 50; ++ls) {
          for (Index x : p.support) {
            // Zeros of W stay zeros; project the rest onto their sub-simplex.
            std::vector<Index> live;
            for (Index y = 0; y < m; ++y) {
              if (w.probabilities(x, y) > 0.0) live.push_back(y);
            }
            Vector sub(static_cast<Index>(live.size()));
            for (std::size_t j = 0; j < live.size(); ++j) {
              sub[static_cast<Index>(j)] = v(x, live[j]) - step * g(x, live[j]);
            }
            sub = detail::project_to_simplex(sub);
            cand.row(x).setZero();
            for (std::size_t j = 0; j < live.size(); ++j) {
              cand(x, live[j]) = sub[static_cast<Index>(j)];
            }
          }
          const double cand_value = objective(cand, mu);
          if (cand_value < value - 1e-14) {
            v = cand;
            value = cand_value;
            step *= 1.25;
            moved = true;
            break;
          }
          step *= 0.5;
        }
        if (!moved || step < 1e-16) break;
      }
    }
    const double d = conditional_kl(pack(v), w, p);
    const double slack = mutual_information(p, pack(v)) - R;
    if (slack <= std::max(tol, 1e-7) && d < best) best = d;
  }
  if (!std::isfinite(best)) {
    throw NoConvergence("Haroutunian minimization found no feasible point",
                        std::numeric_limits<double>::infinity());
  }
  return best;
}

CriticalRate critical_rate(const Channel& w, double tol, const ExponentOptions& opt) {
  const CapacityResult cap = capacity(w);
  const DispersionResult disp = channel_dispersion(w, cap);

  CriticalRate out;
  if (disp.sigma_sq <= 1e-12) {
    // Noiseless-like channel: E_SP jumps from +inf to 0 at C.
    out.R_inf = cap.C;
    out.has_critical_rate = false;
    return out;
  }

  const auto rho_star = [&](double R) { return esp_exponent(R, w, tol, opt).rho_star_sp; };
  const auto finite = [&](double R) { return esp_exponent(R, w, tol, opt).esp_finite; };

  // R_inf: infimum of rates with a finite sphere-packing exponent.
  double lo = 0.0;
  double hi = cap.C;
  if (finite(std::min(1e-9, cap.C * 0.5))) {
    out.R_inf = 0.0;
  } else {
    for (int it = 0; it < 60 && hi - lo > tol; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (finite(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    out.R_inf = 0.5 * (lo + hi);
  }

  // R_cr: the rate at which the optimizing rho crosses one. rho*(R) grows
  // as R falls toward R_inf, so scan down geometrically for a bracket.
  const double hi_r = cap.C - std::min(tol, 0.5 * (cap.C - out.R_inf));
  if (rho_star(hi_r) >= 1.0) {
    out.R_cr = hi_r;
    out.has_critical_rate = true;
    return out;
  }
  double lo_r = hi_r;
  bool bracketed = false;
  for (int it = 0; it < 120; ++it) {
    const double cand = out.R_inf + (lo_r - out.R_inf) * 0.5;
    if (cand <= out.R_inf + 1e-14) break;
    lo_r = cand;
    if (rho_star(lo_r) >= 1.0) {
      bracketed = true;
      break;
    }
  }
  if (!bracketed) {
    throw NoConvergence("no rho* = 1 crossing found above R_inf", lo_r);
  }
  double a = lo_r;
  double b = hi_r;
  for (int it = 0; it < 90 && b - a > tol; ++it) {
    const double mid = 0.5 * (a + b);
    if (rho_star(mid) >= 1.0) {
      a = mid;
    } else {
      b = mid;
    }
  }
  out.R_cr = 0.5 * (a + b);
  out.has_critical_rate = true;
  return out;
}

std::vector<OptimizerPathRow> optimizer_path(const Channel& w, std::span<const double> deltas,
                                             double C, double tol, const ExponentOptions& opt) {
  const TestChannel wt = as_test_channel(w);
  std::vector<OptimizerPathRow> rows;
  rows.reserve(deltas.size());
  for (double delta : deltas) {
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    const ExponentPoint point = esp_exponent(C - delta, w, tol, opt);
    OptimizerPathRow row;
    row.delta = delta;
    row.rho_star = point.rho_star_sp;
    row.rho_over_delta = point.rho_star_sp / delta;
    row.capacity_gap = C - mutual_information(point.P_star, wt);
    row.stationarity_residual = point.stationarity_residual;
    row.P_star = point.P_star;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mdcc
