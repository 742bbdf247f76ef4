#include "mdcc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mdcc/capacity.hpp"
#include "mdcc/detail/parallel.hpp"
#include "mdcc/detail/rng.hpp"
#include "mdcc/errors.hpp"
#include "mdcc/measures.hpp"

namespace mdcc {

namespace {

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

double info_density_variance_pair(const Vector& p, const Matrix& v) {
  const Vector q = v.transpose() * p;
  double m1 = 0.0;
  double m2 = 0.0;
  for (Index x = 0; x < v.rows(); ++x) {
    if (p[x] == 0.0) continue;
    for (Index y = 0; y < v.cols(); ++y) {
      const double vxy = v(x, y);
      if (vxy > 0.0 && q[y] > 0.0) {
        const double i = std::log(vxy / q[y]);
        m1 += p[x] * vxy * i;
        m2 += p[x] * vxy * i * i;
      }
    }
  }
  return std::max(0.0, m2 - m1 * m1);
}

}  // namespace

ConverseConstants make_converse_constants(double A, double gamma) {
  if (!(gamma > 0.0) || !(gamma < 0.5)) throw DomainError("gamma must lie in (0, 1/2)");
  if (!(A >= 1.0)) throw DomainError("A must be at least 1");
  ConverseConstants c;
  c.A = A;
  c.gamma = gamma;
  c.psi = std::sqrt(2.0 * A / gamma);
  return c;
}

double constant_A(const Channel& w, int restarts, std::uint64_t seed) {
  if (restarts < 8) throw DomainError("constant_A needs at least 8 restarts");
  const Index k = w.input_size();
  const Index m = w.output_size();

  // Flatten (P, V) into one parameter block per probe; ascend by compass
  // search over P-mass moves and per-row V-mass moves.
  struct Probe {
    Vector p;
    Matrix v;
  };
  std::vector<Probe> probes;
  {
    Probe uniform{Vector::Constant(k, 1.0 / static_cast<double>(k)),
                  Matrix::Constant(k, m, 1.0 / static_cast<double>(m))};
    probes.push_back(uniform);
    probes.push_back(Probe{uniform.p, w.probabilities});
    // Deterministic vertex-flavored V: rows concentrated on single outputs.
    Matrix conc = Matrix::Constant(k, m, 1e-4);
    for (Index x = 0; x < k; ++x) conc(x, x % m) = 1.0;
    for (Index x = 0; x < k; ++x) conc.row(x) /= conc.row(x).sum();
    probes.push_back(Probe{uniform.p, conc});
  }
  for (int r = 0; r < restarts; ++r) {
    auto rng = detail::Rng::substream(seed, {0xAAu, static_cast<std::uint64_t>(r)});
    Probe pr;
    pr.p = detail::dirichlet(rng, k);
    pr.v.resize(k, m);
    for (Index x = 0; x < k; ++x) pr.v.row(x) = detail::dirichlet(rng, m).transpose();
    probes.push_back(std::move(pr));
  }

  std::vector<double> results(probes.size(), 0.0);
  detail::parallel_for(probes.size(), [&](std::size_t i) {
    Vector p = probes[i].p;
    Matrix v = probes[i].v;
    double best = info_density_variance_pair(p, v);
    double step = 0.25;
    while (step > 1e-9) {
      bool improved = false;
      // Moves in P.
      for (Index a = 0; a < k; ++a) {
        for (Index b = 0; b < k; ++b) {
          if (a == b) continue;
          const double move = std::min(step, p[b]);
          if (move <= 0.0) continue;
          Vector cand = p;
          cand[a] += move;
          cand[b] -= move;
          const double val = info_density_variance_pair(cand, v);
          if (val > best) {
            best = val;
            p = cand;
            improved = true;
          }
        }
      }
      // Moves in the rows of V.
      for (Index x = 0; x < k; ++x) {
        for (Index a = 0; a < m; ++a) {
          for (Index b = 0; b < m; ++b) {
            if (a == b) continue;
            const double move = std::min(step, v(x, b));
            if (move <= 0.0) continue;
            Matrix cand = v;
            cand(x, a) += move;
            cand(x, b) -= move;
            const double val = info_density_variance_pair(p, cand);
            if (val > best) {
              best = val;
              v = cand;
              improved = true;
            }
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    results[i] = best;
  });

  double max_var = 0.0;
  for (double v : results) max_var = std::max(max_var, v);
  return max_var + 1.0;
}

double log_gallager_upper(long n, double R, const Channel& w, const ExponentOptions& opt) {
  if (n < 1) throw DomainError("blocklength must be at least 1");
  if (!(R >= 0.0)) throw DomainError("rate must be nonnegative");
  const ExponentPoint point = err_exponent(R, w, 1e-9, opt);
  return std::min(0.0, std::log(4.0) - static_cast<double>(n) * point.E_r);
}

double gallager_upper(long n, double R, const Channel& w, const ExponentOptions& opt) {
  return clamp_probability(std::exp(log_gallager_upper(n, R, w, opt)));
}

double strong_converse_lower(long n, double delta, double A) {
  if (n < 1) throw DomainError("blocklength must be at least 1");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  const double nd = static_cast<double>(n);
  return std::max(0.0, 1.0 - A / (nd * delta * delta) - std::exp(-nd * delta));
}

ComLowerResult com_lower(long n, double R_n, const InputDistribution& P_n, double gamma,
                         const ConverseConstants& consts, const Channel& w, double C,
                         bool with_form_a, const ExponentOptions& opt) {
  if (n < 1) throw DomainError("blocklength must be at least 1");
  if (!(gamma > 0.0) || !(gamma < 0.5)) throw DomainError("gamma must lie in (0, 1/2)");
  const double nd = static_cast<double>(n);
  const double eps_n = C - R_n;
  const double backoff = 2.0 * consts.psi / std::sqrt(nd);

  ComLowerResult out;
  out.delta_n = eps_n + backoff;
  out.form_a = std::numeric_limits<double>::quiet_NaN();
  out.log_form_a = std::numeric_limits<double>::quiet_NaN();

  // Applicability: the rate stays positive after the converse backoff and
  // the strong-converse tail is already below gamma/2.
  const bool rate_ok = C - (eps_n + backoff) > 0.0;
  const bool tail_ok = std::exp(-consts.psi * std::sqrt(nd)) <= gamma / 2.0;
  if (!rate_ok || !tail_ok) {
    out.applicable = false;
    return out;
  }
  out.applicable = true;

  const double h_term = binary_entropy(1.0 - gamma) / (1.0 - gamma);

  if (with_form_a) {
    const double d_min = esp_haroutunian(R_n - backoff, w, P_n, 1e-9);
    out.log_form_a = -nd * d_min / (1.0 - gamma) - h_term;
    out.form_a = clamp_probability(std::exp(out.log_form_a));
  }

  const ExponentPoint esp = esp_exponent(C - out.delta_n, w, 1e-9, opt);
  const double esp_value = esp.esp_finite ? esp.E_SP : std::numeric_limits<double>::infinity();
  out.log_form_b = -h_term - nd * esp_value / (1.0 - gamma);
  out.form_b = clamp_probability(std::exp(out.log_form_b));
  return out;
}

double normal_approx_rate(long n, double eps, double C, double sigma_sq) {
  if (n < 1) throw DomainError("blocklength must be at least 1");
  if (!(eps > 0.0) || !(eps < 0.5)) throw DomainError("target error must lie in (0, 1/2)");
  if (sigma_sq <= 0.0) throw ZeroDispersion("normal approximation needs positive dispersion");
  return C - std::sqrt(sigma_sq / static_cast<double>(n)) * inverse_gaussian_cdf(1.0 - eps);
}

double normal_approx_rate(long n, double eps, const Channel& w) {
  const CapacityResult cap = capacity(w);
  const DispersionResult disp = channel_dispersion(w, cap);
  return normal_approx_rate(n, eps, cap.C, disp.sigma_sq);
}

double inverse_gaussian_cdf(double q) {
  if (!(q > 0.0) || !(q < 1.0)) throw DomainError("quantile argument must lie in (0, 1)");

  // Acklam's rational approximation followed by one Newton step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (q < plow) {
    const double u = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  } else if (q <= 1.0 - plow) {
    const double u = q - 0.5;
    const double r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double u = std::sqrt(-2.0 * std::log(1.0 - q));
    x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }
  // Newton polish with the exact cdf in double precision.
  const double cdf = 0.5 * std::erfc(-x / std::sqrt(2.0));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  if (pdf > 0.0) x -= (cdf - q) / pdf;
  return x;
}

}  // namespace mdcc
