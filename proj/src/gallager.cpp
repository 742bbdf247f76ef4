#include "mdcc/gallager.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mdcc/detail/parallel.hpp"
#include "mdcc/detail/rng.hpp"
#include "mdcc/detail/simplex.hpp"
#include "mdcc/errors.hpp"

namespace mdcc {

namespace {

void check_args(double rho, const InputDistribution& p, const Channel& w) {
  if (!(rho >= 0.0)) throw NegativeRho("rho must be nonnegative");
  if (p.size() != w.input_size()) throw ShapeMismatch("P does not match channel inputs");
}

// f_y(rho, P) = sum_{x in X_y} P(x) W(y|x)^{1/(1+rho)} and its first three
// rho-derivatives. The sums run over the support set only, so zero channel
// entries are never raised to a power.
struct FyDerivatives {
  double f = 0.0, f1 = 0.0, f2 = 0.0, f3 = 0.0;
};

FyDerivatives fy_derivatives(double rho, const InputDistribution& p, const Channel& w,
                             Index y) {
  const double r1 = 1.0 + rho;
  FyDerivatives out;
  for (Index x : w.support_by_output[static_cast<std::size_t>(y)]) {
    const double px = p.weights[x];
    if (px == 0.0) continue;
    const double wxy = w.probabilities(x, y);
    const double lw = std::log(wxy);
    const double base = px * std::pow(wxy, 1.0 / r1);
    const double u = lw / r1;
    out.f += base;
    out.f1 += base * lw;
    out.f2 += base * lw * (2.0 + u);
    out.f3 += base * lw * (6.0 + 6.0 * u + u * u);
  }
  out.f1 *= -1.0 / (r1 * r1);
  out.f2 *= 1.0 / (r1 * r1 * r1);
  out.f3 *= -1.0 / (r1 * r1 * r1 * r1);
  return out;
}

}  // namespace

double eo(double rho, const InputDistribution& p, const Channel& w) {
  check_args(rho, p, w);
  const double r1 = 1.0 + rho;
  double total = 0.0;
  for (Index y = 0; y < w.output_size(); ++y) {
    double fy = 0.0;
    for (Index x : w.support_by_output[static_cast<std::size_t>(y)]) {
      const double px = p.weights[x];
      if (px > 0.0) fy += px * std::pow(w.probabilities(x, y), 1.0 / r1);
    }
    if (fy > 0.0) total += std::pow(fy, r1);
  }
  return -std::log(total);
}

EoEvaluation eo_derivatives(double rho, const InputDistribution& p, const Channel& w) {
  check_args(rho, p, w);
  const double r1 = 1.0 + rho;

  // Sums over y of g_y and its derivatives, with g_y = f_y^{1+rho}
  // differentiated through log g_y = (1+rho) log f_y.
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (Index y = 0; y < w.output_size(); ++y) {
    const FyDerivatives fy = fy_derivatives(rho, p, w, y);
    if (fy.f <= 0.0) continue;  // S(P) and X_y disjoint: zero contribution
    const double u = fy.f1 / fy.f;
    const double a = fy.f2 / fy.f;
    const double b = fy.f3 / fy.f;
    const double lf = std::log(fy.f);
    const double l1 = lf + r1 * u;
    const double l2 = 2.0 * u + r1 * (a - u * u);
    const double l3 = 3.0 * (a - u * u) + r1 * (b - a * u - 2.0 * u * (a - u * u));
    const double g = std::exp(r1 * lf);
    s0 += g;
    s1 += g * l1;
    s2 += g * (l1 * l1 + l2);
    s3 += g * (l1 * l1 * l1 + 3.0 * l1 * l2 + l3);
  }

  EoEvaluation out;
  out.rho = rho;
  out.value = -std::log(s0);
  out.d1 = -s1 / s0;
  out.d2 = -s2 / s0 + out.d1 * out.d1;
  out.d3 = -s3 / s0 + 3.0 * out.d1 * out.d2 - out.d1 * out.d1 * out.d1;
  return out;
}

ThirdDerivativeBound third_derivative_bound(const Channel& w, int grid_density, int restarts,
                                            std::uint64_t seed) {
  if (grid_density < 2) throw DomainError("grid_density must be at least 2");
  const Index k = w.input_size();

  std::vector<Vector> probes;
  probes.push_back(Vector::Constant(k, 1.0 / static_cast<double>(k)));
  for (Index x = 0; x < k; ++x) {
    Vector v = Vector::Constant(k, 1e-9);
    v[x] = 1.0;
    probes.push_back(v / v.sum());
  }
  for (Index x = 0; x < k; ++x) {
    for (Index x2 = x + 1; x2 < k; ++x2) {
      Vector v = Vector::Constant(k, 1e-9);
      v[x] = 0.5;
      v[x2] = 0.5;
      probes.push_back(v / v.sum());
    }
  }
  for (int r = 0; r < restarts; ++r) {
    auto rng = detail::Rng::substream(seed, {0xd3u, static_cast<std::uint64_t>(r)});
    probes.push_back(detail::dirichlet(rng, k));
  }

  std::vector<double> rhos(static_cast<std::size_t>(grid_density));
  for (int i = 0; i < grid_density; ++i) {
    rhos[static_cast<std::size_t>(i)] = static_cast<double>(i) / (grid_density - 1);
  }

  const auto abs_d3 = [&](double rho, const Vector& pv) {
    return std::abs(eo_derivatives(rho, normalized_input(pv), w).d3);
  };

  std::vector<double> probe_best(probes.size(), 0.0);
  std::vector<double> probe_rho(probes.size(), 0.0);
  detail::parallel_for(probes.size(), [&](std::size_t i) {
    double best = 0.0;
    double best_rho = 0.0;
    for (double rho : rhos) {
      const double v = abs_d3(rho, probes[i]);
      if (v > best) {
        best = v;
        best_rho = rho;
      }
    }
    // Local ascent in P at the best rho, then a fine rho sweep at that P.
    const Vector refined = detail::pattern_search_simplex(
        [&](const Vector& pv) { return abs_d3(best_rho, pv); }, probes[i], 0.25, 1e-7);
    for (int j = 0; j <= 400; ++j) {
      const double rho = static_cast<double>(j) / 400.0;
      const double v = abs_d3(rho, refined);
      if (v > best) {
        best = v;
        best_rho = rho;
      }
    }
    probe_best[i] = best;
    probe_rho[i] = best_rho;
  });

  ThirdDerivativeBound bound;
  for (double v : probe_best) bound.M = std::max(bound.M, v);
  return bound;
}

}  // namespace mdcc
