#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mdcc/bounds.hpp"
#include "mdcc/capacity.hpp"
#include "mdcc/channel.hpp"
#include "mdcc/gallager.hpp"

namespace mdcc {

/// Rate back-off schedule eps_n. Power laws a n^{-t} with t in (0, 1/2)
/// satisfy both vanishing conditions analytically; user tables are only
/// trend-checked over the supplied range and flagged accordingly.
struct RateSchedule {
  enum class Kind { power_law, table };
  Kind kind = Kind::power_law;
  double a = 1.0;
  double t = 1.0 / 3.0;
  std::vector<std::pair<long, double>> table;
  bool unvalidated_tail = false;

  double eps(long n) const;
};

RateSchedule make_schedule(double a, double t);
RateSchedule make_table_schedule(std::span<const std::pair<long, double>> entries);

struct MdpParameters {
  RateSchedule schedule;
  double gamma = 0.1;
  ConverseConstants consts;
  ThirdDerivativeBound M;
  double sigma_sq = 0.0;
  double C = 0.0;
  double target = 0.0;  // -1/(2 sigma^2)
};

/// Computes every channel constant the sandwich needs; refuses channels with
/// zero dispersion, for which the normalized limit does not exist.
MdpParameters make_mdp_parameters(const Channel& w, const RateSchedule& schedule,
                                  double gamma, std::uint64_t seed, double tol = 1e-9);

struct NormalizedValue {
  bool applicable = false;
  double value = 0.0;
};

/// (1/(n eps_n^2)) log of the Gallager upper bound at rate C - eps_n.
NormalizedValue upper_normalized(long n, const MdpParameters& params, const Channel& w);

/// Closed-form Taylor envelope log4/(n eps^2) - (1 - M eps/(3 sigma^4))/(2 sigma^2).
NormalizedValue taylor_envelope(long n, const MdpParameters& params);

/// (1/(n eps_n^2)) log of the capacity-form change-of-measure bound.
NormalizedValue lower_normalized(long n, const MdpParameters& params, const Channel& w);

/// E_SP(C - delta, W)/delta^2.
double esp_ratio(double delta, const Channel& w, double C, double tol = 1e-9,
                 const ExponentOptions& opt = {});

/// upper_norm and lower_norm are the literal normalized bound logs. The gap
/// columns track convergence of the exponent parts: the additive transients
/// log4/(n eps^2) and -h(1-gamma)/((1-gamma) n eps^2) vanish on their own and
/// would otherwise mask the trend (at n = 1e3 on the BSC they nearly cancel
/// the Taylor deficit).
struct ConvergenceRow {
  long n = 0;
  double eps_n = 0.0;
  double R_n = 0.0;
  double upper_norm = 0.0;
  double lower_norm = 0.0;
  double taylor_env = 0.0;
  double gap_upper = 0.0;
  double gap_lower = 0.0;
  bool upper_applicable = false;
  bool lower_applicable = false;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double target = 0.0;
  double gamma_target = 0.0;  // target/(1-gamma)
};

/// Rows are computed independently in parallel and assembled in n order.
ConvergenceReport convergence_report(std::span<const long> n_grid,
                                     const MdpParameters& params, const Channel& w);

}  // namespace mdcc
