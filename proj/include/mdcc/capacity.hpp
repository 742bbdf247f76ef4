#pragma once

#include <string>
#include <vector>

#include "mdcc/channel.hpp"

namespace mdcc {

struct CapacityResult {
  double C = 0.0;
  InputDistribution P_star;
  Vector Q_star;
  std::vector<Index> admissible_inputs;  // {x : D(W(.|x)||Q*) >= C - tol_kkt}
  long iterations = 0;
  double gap = 0.0;      // width of the final capacity bracket
  double tol_kkt = 0.0;  // admissibility slack used for this result
};

/// Alternating-maximization capacity computation with the standard
/// per-iteration bracket max_x D(W(.|x)||Q) >= C >= I(P;W).
CapacityResult capacity(const Channel& w, double tol = 1e-9, long max_iter = 5000000);

/// sigma^2(P, W): variance of the information density under P x W.
double conditional_dispersion(const InputDistribution& p, const Channel& w);

struct DispersionResult {
  double sigma_sq = 0.0;
  InputDistribution minimizer;
  Vector per_letter_variance;  // V_x = Var_{Y~W(.|x)} log(W(Y|x)/Q*(Y))
  std::string method;          // "lp" or "brute"
};

/// Channel dispersion: minimizes sigma^2(P, W) over capacity-achieving P by
/// linear programming over {P : supp(P) admissible, P W = Q*}, where the
/// objective is linear because every admissible input has conditional
/// divergence C against Q*. Ties are broken by the lexicographically
/// smallest minimizer.
DispersionResult channel_dispersion(const Channel& w, const CapacityResult& cap);

/// Independent oracle for channel_dispersion: direct penalized minimization
/// of sigma^2(P, W) near the capacity-achieving set, seeded from a simplex
/// grid scan. Only for |X| <= 4.
DispersionResult dispersion_brute(const Channel& w, const CapacityResult& cap,
                                  double grid_step = 0.01);

}  // namespace mdcc
