#include "mdcc/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdcc/detail/lp.hpp"
#include "mdcc/detail/simplex.hpp"
#include "mdcc/errors.hpp"
#include "mdcc/measures.hpp"

namespace mdcc {

namespace {

// D(W(.|x)||Q) for one input row.
double row_divergence(const Channel& w, Index x, const Vector& q) {
  double d = 0.0;
  for (Index y = 0; y < w.output_size(); ++y) {
    const double wxy = w.probabilities(x, y);
    if (wxy > 0.0) d += wxy * std::log(wxy / q[y]);
  }
  return d;
}

// Var_{Y ~ W(.|x)} [log(W(Y|x)/Q(Y))].
double row_variance(const Channel& w, Index x, const Vector& q) {
  double m1 = 0.0;
  double m2 = 0.0;
  for (Index y = 0; y < w.output_size(); ++y) {
    const double wxy = w.probabilities(x, y);
    if (wxy > 0.0) {
      const double i = std::log(wxy / q[y]);
      m1 += wxy * i;
      m2 += wxy * i * i;
    }
  }
  const double var = m2 - m1 * m1;
  return var > 0.0 ? var : 0.0;
}

// Drops negligible mass so that Q* is generated exactly by the reported P*.
InputDistribution polish(const Vector& p) {
  Vector out = p;
  for (Index x = 0; x < out.size(); ++x) {
    if (out[x] < 1e-12) out[x] = 0.0;
  }
  return normalized_input(out);
}

}  // namespace

CapacityResult capacity(const Channel& w, double tol, long max_iter) {
  if (!(tol > 0.0)) throw DomainError("capacity tolerance must be positive");
  const Index k = w.input_size();

  Vector p = Vector::Constant(k, 1.0 / static_cast<double>(k));
  Vector divergences(k);
  CapacityResult result;
  result.tol_kkt = std::max(10.0 * tol, 1e-9);

  const auto bracket = [&](const Vector& point, double* info, double* upper) {
    const Vector q = w.probabilities.transpose() * point;
    *info = 0.0;
    *upper = -std::numeric_limits<double>::infinity();
    for (Index x = 0; x < k; ++x) {
      divergences[x] = row_divergence(w, x, q);
      *info += point[x] * divergences[x];
      *upper = std::max(*upper, divergences[x]);
    }
  };

  double info = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  Vector polished;
  double info_pol = 0.0;
  double upper_pol = std::numeric_limits<double>::infinity();
  long iter = 0;
  for (; iter < max_iter; ++iter) {
    bracket(p, &info, &upper);
    if (upper - info <= tol) {
      // Dropping negligible mass must not cost the bracket; if it does,
      // keep iterating from the polished point.
      polished = polish(p).weights;
      bracket(polished, &info_pol, &upper_pol);
      if (upper_pol - info_pol <= tol) break;
      p = polished;
      bracket(p, &info, &upper);
    }
    for (Index x = 0; x < k; ++x) p[x] *= std::exp(divergences[x] - upper);
    p /= p.sum();
  }
  if (!(upper_pol - info_pol <= tol)) {
    throw NoConvergence("capacity bracket did not reach tolerance", upper - info);
  }

  result.P_star = make_input_distribution(polished);
  result.Q_star = w.probabilities.transpose() * result.P_star.weights;
  bracket(result.P_star.weights, &info_pol, &upper_pol);
  result.C = 0.5 * (info_pol + upper_pol);
  result.gap = upper_pol - info_pol;
  result.iterations = iter;
  for (Index x = 0; x < k; ++x) {
    if (divergences[x] >= result.C - result.tol_kkt) result.admissible_inputs.push_back(x);
  }
  return result;
}

double conditional_dispersion(const InputDistribution& p, const Channel& w) {
  return info_density_variance(p, as_test_channel(w));
}

DispersionResult channel_dispersion(const Channel& w, const CapacityResult& cap) {
  const Index k = w.input_size();
  const Index m = w.output_size();
  const auto& adm = cap.admissible_inputs;
  const Index na = static_cast<Index>(adm.size());

  Vector vx_all = Vector::Zero(k);
  for (Index x = 0; x < k; ++x) vx_all[x] = row_variance(w, x, cap.Q_star);

  // Variables: P restricted to the admissible inputs.
  // Constraints: P W = Q* (output match) and sum P = 1.
  Matrix A(m + 1, na);
  Vector b(m + 1);
  Vector c(na);
  for (Index j = 0; j < na; ++j) {
    const Index x = adm[static_cast<std::size_t>(j)];
    for (Index y = 0; y < m; ++y) A(y, j) = w.probabilities(x, y);
    A(m, j) = 1.0;
    c[j] = vx_all[x];
  }
  b.head(m) = cap.Q_star;
  b[m] = 1.0;

  const detail::LpResult lp = detail::lp_lexicographic_min(A, b, c, 1e-10);
  if (!lp.feasible) {
    throw InfeasiblePolytope(
        "capacity-achieving polytope empty at the current KKT tolerance; loosen tol_kkt");
  }

  DispersionResult out;
  Vector full = Vector::Zero(k);
  for (Index j = 0; j < na; ++j) full[adm[static_cast<std::size_t>(j)]] = lp.x[j];
  out.minimizer = normalized_input(full);
  out.per_letter_variance = vx_all;
  out.sigma_sq = vx_all.dot(out.minimizer.weights);
  out.method = "lp";
  return out;
}

DispersionResult dispersion_brute(const Channel& w, const CapacityResult& cap,
                                  double grid_step) {
  const Index k = w.input_size();
  if (k > 4) throw AlphabetTooLarge("dispersion_brute supports at most 4 inputs");
  if (!(grid_step > 0.0) || grid_step > 0.5) throw DomainError("bad grid step");

  const TestChannel tc = as_test_channel(w);
  const auto info = [&](const Vector& p) {
    return mutual_information(make_input_distribution(p), tc);
  };
  const auto sigma = [&](const Vector& p) {
    return info_density_variance(make_input_distribution(p), tc);
  };

  // Penalized objective: the capacity defect C - I is nonnegative, so for
  // large lambda the minimizer is pushed onto the capacity-achieving set.
  const auto score = [&](const Vector& p, double lambda) {
    return sigma(p) + lambda * (cap.C - info(p));
  };

  const long N = std::max<long>(2, std::lround(1.0 / grid_step));
  Vector best_seed = cap.P_star.weights;
  double best_seed_score = score(best_seed, 1e3);
  detail::simplex_grid(k, N, [&](const Vector& p) {
    const double s = score(p, 1e3);
    if (s < best_seed_score) {
      best_seed_score = s;
      best_seed = p;
    }
  });

  Vector current = best_seed;
  for (double lambda : {1e3, 1e5, 1e7, 1e9}) {
    current = detail::pattern_search_simplex(
        [&](const Vector& p) { return -score(p, lambda); }, current, grid_step, 1e-10);
  }
  // The capacity maximizer itself is always a feasible fallback.
  if (sigma(cap.P_star.weights) < sigma(current) &&
      cap.C - info(cap.P_star.weights) <= cap.tol_kkt) {
    current = cap.P_star.weights;
  }
  if (cap.C - info(current) > cap.tol_kkt) {
    throw NoConvergence("brute dispersion search did not reach the capacity set",
                        cap.C - info(current));
  }

  DispersionResult out;
  out.minimizer = make_input_distribution(current);
  out.per_letter_variance = Vector::Zero(k);
  for (Index x = 0; x < k; ++x) out.per_letter_variance[x] = row_variance(w, x, cap.Q_star);
  out.sigma_sq = sigma(current);
  out.method = "brute";
  return out;
}

}  // namespace mdcc
