#include "mdcc/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdcc/detail/parallel.hpp"
#include "mdcc/errors.hpp"
#include "mdcc/exponents.hpp"
#include "mdcc/measures.hpp"

namespace mdcc {

double RateSchedule::eps(long n) const {
  if (n < 1) throw DomainError("blocklength must be at least 1");
  if (kind == Kind::power_law) {
    return a * std::pow(static_cast<double>(n), -t);
  }
  // Table lookup with log-linear interpolation between supplied points.
  if (table.empty()) throw DomainError("empty schedule table");
  if (n <= table.front().first) return table.front().second;
  if (n >= table.back().first) return table.back().second;
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (n <= table[i].first) {
      const auto [n0, e0] = table[i - 1];
      const auto [n1, e1] = table[i];
      const double f = (std::log(static_cast<double>(n)) - std::log(static_cast<double>(n0))) /
                       (std::log(static_cast<double>(n1)) - std::log(static_cast<double>(n0)));
      return e0 * std::pow(e1 / e0, f);
    }
  }
  return table.back().second;
}

RateSchedule make_schedule(double a, double t) {
  if (!(a > 0.0)) throw DomainError("schedule amplitude must be positive");
  if (!(t > 0.0) || !(t < 0.5)) {
    throw ScheduleViolatesEq7("power-law exponent must lie strictly inside (0, 1/2)");
  }
  RateSchedule s;
  s.kind = RateSchedule::Kind::power_law;
  s.a = a;
  s.t = t;
  return s;
}

RateSchedule make_table_schedule(std::span<const std::pair<long, double>> entries) {
  if (entries.size() < 2) throw DomainError("schedule table needs at least two points");
  RateSchedule s;
  s.kind = RateSchedule::Kind::table;
  s.table.assign(entries.begin(), entries.end());
  std::sort(s.table.begin(), s.table.end());
  for (std::size_t i = 0; i < s.table.size(); ++i) {
    const auto [n, e] = s.table[i];
    if (n < 1 || !(e > 0.0)) throw DomainError("schedule table entries must be positive");
    if (i > 0) {
      const auto [pn, pe] = s.table[i - 1];
      if (n == pn) throw DomainError("duplicate blocklength in schedule table");
      // Trend checks over the supplied range: eps decreasing, eps sqrt(n)
      // increasing. The tail beyond the table is unvalidated by nature.
      if (!(e < pe)) {
        throw ScheduleViolatesEq7("table eps_n does not decrease over the supplied range");
      }
      if (!(e * std::sqrt(static_cast<double>(n)) >
            pe * std::sqrt(static_cast<double>(pn)))) {
        throw ScheduleViolatesEq7("table eps_n sqrt(n) does not increase over the range");
      }
    }
  }
  s.unvalidated_tail = true;
  return s;
}

MdpParameters make_mdp_parameters(const Channel& w, const RateSchedule& schedule,
                                  double gamma, std::uint64_t seed, double tol) {
  const CapacityResult cap = capacity(w, tol);
  const DispersionResult disp = channel_dispersion(w, cap);
  if (disp.sigma_sq <= 1e-12) {
    throw ZeroDispersion("moderate-deviations analysis requires sigma^2(W) > 0");
  }

  MdpParameters params;
  params.schedule = schedule;
  params.gamma = gamma;
  params.consts = make_converse_constants(constant_A(w, 64, seed), gamma);
  params.M = third_derivative_bound(w, 33, 64, seed);
  // The Taylor chain evaluates d3 along the dispersion minimizer; make sure
  // the reported bound also dominates that slice.
  for (int i = 0; i <= 400; ++i) {
    const double rho = static_cast<double>(i) / 400.0;
    params.M.M = std::max(params.M.M, std::abs(eo_derivatives(rho, disp.minimizer, w).d3));
  }
  params.sigma_sq = disp.sigma_sq;
  params.C = cap.C;
  params.target = -1.0 / (2.0 * disp.sigma_sq);
  return params;
}

NormalizedValue upper_normalized(long n, const MdpParameters& params, const Channel& w) {
  const double eps = params.schedule.eps(n);
  NormalizedValue out;
  if (!(params.C - eps > 0.0)) return out;  // rate not yet positive at this n
  out.applicable = true;
  const double norm = static_cast<double>(n) * eps * eps;
  out.value = log_gallager_upper(n, params.C - eps, w) / norm;
  return out;
}

NormalizedValue taylor_envelope(long n, const MdpParameters& params) {
  const double eps = params.schedule.eps(n);
  NormalizedValue out;
  if (!(params.C - eps > 0.0)) return out;
  out.applicable = true;
  const double norm = static_cast<double>(n) * eps * eps;
  const double s2 = params.sigma_sq;
  out.value = std::log(4.0) / norm -
              (1.0 - params.M.M * eps / (3.0 * s2 * s2)) / (2.0 * s2);
  return out;
}

NormalizedValue lower_normalized(long n, const MdpParameters& params, const Channel& w) {
  const double eps = params.schedule.eps(n);
  NormalizedValue out;
  if (!(params.C - eps > 0.0)) return out;
  const InputDistribution dummy = uniform_input(w.input_size());
  const ComLowerResult bound = com_lower(n, params.C - eps, dummy, params.gamma,
                                         params.consts, w, params.C, /*with_form_a=*/false);
  if (!bound.applicable) return out;
  out.applicable = true;
  out.value = bound.log_form_b / (static_cast<double>(n) * eps * eps);
  return out;
}

double esp_ratio(double delta, const Channel& w, double C, double tol,
                 const ExponentOptions& opt) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  const ExponentPoint point = esp_exponent(C - delta, w, tol, opt);
  if (!point.esp_finite) return std::numeric_limits<double>::infinity();
  return point.E_SP / (delta * delta);
}

ConvergenceReport convergence_report(std::span<const long> n_grid,
                                     const MdpParameters& params, const Channel& w) {
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) throw DomainError("n grid must be increasing");
  }
  ConvergenceReport report;
  report.target = params.target;
  report.gamma_target = params.target / (1.0 - params.gamma);
  report.rows.resize(n_grid.size());
  detail::parallel_for(n_grid.size(), [&](std::size_t i) {
    const long n = n_grid[i];
    ConvergenceRow row;
    row.n = n;
    row.eps_n = params.schedule.eps(n);
    row.R_n = params.C - row.eps_n;
    const NormalizedValue up = upper_normalized(n, params, w);
    const NormalizedValue env = taylor_envelope(n, params);
    const NormalizedValue low = lower_normalized(n, params, w);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double norm = static_cast<double>(n) * row.eps_n * row.eps_n;
    row.upper_applicable = up.applicable;
    row.lower_applicable = low.applicable;
    row.upper_norm = up.applicable ? up.value : nan;
    row.taylor_env = env.applicable ? env.value : nan;
    row.lower_norm = low.applicable ? low.value : nan;
    const double upper_transient = std::log(4.0) / norm;
    const double lower_transient =
        -binary_entropy(1.0 - params.gamma) / ((1.0 - params.gamma) * norm);
    row.gap_upper =
        up.applicable ? std::abs(up.value - upper_transient - report.target) : nan;
    row.gap_lower =
        low.applicable ? std::abs(low.value - lower_transient - report.gamma_target) : nan;
    report.rows[i] = row;
  });
  return report;
}

}  // namespace mdcc
