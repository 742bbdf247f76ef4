#pragma once

#include <cstdint>
#include <string>

#include "mdcc/channel.hpp"
#include "mdcc/exponents.hpp"

namespace mdcc {

struct ConverseConstants {
  double A = 1.0;
  double gamma = 0.1;
  double psi = 0.0;  // psi^2 = 2A/gamma
  std::string certified = "heuristic max";
};

/// Assembles the converse constants from a given A; gamma must lie in (0, 1/2).
ConverseConstants make_converse_constants(double A, double gamma);

/// Heuristic maximum of Var[log V(Y|X)/Q(Y)] over the product of the input
/// simplex and the stochastic matrices, plus one. Depends only on the
/// alphabet sizes of w. Deterministic for a fixed seed.
double constant_A(const Channel& w, int restarts = 64, std::uint64_t seed = 1);

/// Gallager random-coding bound 4 exp(-n E_r(R, W)), clamped to [0, 1].
double gallager_upper(long n, double R, const Channel& w,
                      const ExponentOptions& opt = {});

/// log of gallager_upper without the underflow of exponentiating first.
double log_gallager_upper(long n, double R, const Channel& w,
                          const ExponentOptions& opt = {});

/// Strong-converse bound 1 - A/(n delta^2) - exp(-n delta), clamped at 0.
double strong_converse_lower(long n, double delta, double A);

/// Change-of-measure lower bound, both forms.
///  (a) type-specific: needs the code's common type P_n (oracle-scale alphabets);
///  (b) capacity form: exp{-h(1-gamma)/(1-gamma)} exp{-n E_SP(C - delta_n)/(1-gamma)}
///      with delta_n = eps_n + 2 psi/sqrt(n).
/// Rows where the applicability conditions fail carry applicable = false.
struct ComLowerResult {
  bool applicable = false;
  double delta_n = 0.0;
  double form_a = 0.0;     // clamped probability; NaN when not computed
  double form_b = 0.0;     // clamped probability
  double log_form_a = 0.0; // raw logs for normalized diagnostics
  double log_form_b = 0.0;
};

ComLowerResult com_lower(long n, double R_n, const InputDistribution& P_n, double gamma,
                         const ConverseConstants& consts, const Channel& w, double C,
                         bool with_form_a = true, const ExponentOptions& opt = {});

/// Strassen normal-approximation rate C - sqrt(sigma^2/n) PhiInv(1 - eps);
/// the O(log n / n) term is deliberately omitted.
double normal_approx_rate(long n, double eps, double C, double sigma_sq);
double normal_approx_rate(long n, double eps, const Channel& w);

/// Standard Gaussian quantile, absolute error below 1e-9.
double inverse_gaussian_cdf(double q);

}  // namespace mdcc
