#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mdcc/channel.hpp"

namespace mdcc {

/// Knobs for the exponent optimizers. The defaults satisfy every tolerance
/// used in the test suite; audit mode densifies the outer rho grid to step
/// audit_step for cross-checking the grid-plus-refinement strategy.
struct ExponentOptions {
  int grid_density = 64;
  double rho_max = 100.0;
  double inner_tol = 1e-9;
  bool audit = false;
  double audit_step = 1e-3;
  long max_inner_iters = 200000;
};

struct ExponentPoint {
  double R = 0.0;
  double E_r = 0.0;
  double E_SP = 0.0;
  bool esp_finite = true;
  double rho_star_r = 0.0;
  double rho_star_sp = 0.0;
  InputDistribution P_star;
  double stationarity_residual = 0.0;  // |dE_o/drho at rho* - R| when interior
};

struct CriticalRate {
  double R_cr = 0.0;
  double R_inf = 0.0;
  bool has_critical_rate = false;
};

/// Maximizes E_o(rho, .) over the input simplex by minimizing the convex
/// surrogate sum_y f_y^{1+rho} with projected gradient descent; terminates on
/// a Frank-Wolfe duality gap certificate. Multistarts from the uniform
/// distribution and the simplex vertices; ties within 1e-9 of the best value
/// resolve to the lexicographically smallest maximizer.
std::pair<InputDistribution, double> max_eo_over_p(double rho, const Channel& w,
                                                   double tol = 1e-9,
                                                   long max_iters = 200000);

/// Random-coding exponent: max over rho in [0,1] and P of E_o(rho,P) - rho R.
ExponentPoint err_exponent(double R, const Channel& w, double tol = 1e-9,
                           const ExponentOptions& opt = {});

/// Sphere-packing exponent over rho in [0, rho_max]; flagged infinite when
/// the objective is still climbing at rho_max (the R <= R_inf regime).
ExponentPoint esp_exponent(double R, const Channel& w, double tol = 1e-9,
                           const ExponentOptions& opt = {});

/// Haroutunian form at fixed P: min over V with I(P;V) <= R of D(V||W|P),
/// solved directly by penalized projected descent over the rows of V.
/// Oracle-scale only (alphabets of size at most 4).
double esp_haroutunian(double R, const Channel& w, const InputDistribution& p,
                       double tol = 1e-9);

/// R_cr (optimizing rho hits one) and R_inf (sphere-packing divergence
/// threshold), both located by bisection. Channels with zero dispersion get
/// R_inf = C and no critical rate.
CriticalRate critical_rate(const Channel& w, double tol = 1e-7,
                           const ExponentOptions& opt = {});

struct OptimizerPathRow {
  double delta = 0.0;
  double rho_star = 0.0;
  double rho_over_delta = 0.0;
  double capacity_gap = 0.0;  // C - I(P*; W)
  double stationarity_residual = 0.0;
  InputDistribution P_star;
};

/// Traces the sphere-packing optimizers at rates C - delta for each delta.
std::vector<OptimizerPathRow> optimizer_path(const Channel& w, std::span<const double> deltas,
                                             double C, double tol = 1e-9,
                                             const ExponentOptions& opt = {});

}  // namespace mdcc
