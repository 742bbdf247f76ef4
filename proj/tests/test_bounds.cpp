#include <doctest.h>

#include <cmath>

#include "mdcc/bounds.hpp"
#include "mdcc/capacity.hpp"
#include "mdcc/channel.hpp"
#include "mdcc/detail/parallel.hpp"
#include "mdcc/detail/rng.hpp"
#include "mdcc/errors.hpp"
#include "mdcc/measures.hpp"
#include "oracles.hpp"

using namespace mdcc;

namespace {

double brute_variance_2x2() {
  // Grid scan over (P, V) at step 0.01, refined at 0.001 around the best cell.
  const auto var = [](double a, double v0, double v1) {
    const double p[2] = {a, 1.0 - a};
    const double v[2][2] = {{v0, 1.0 - v0}, {v1, 1.0 - v1}};
    const double q[2] = {p[0] * v[0][0] + p[1] * v[1][0], p[0] * v[0][1] + p[1] * v[1][1]};
    double m1 = 0.0;
    double m2 = 0.0;
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        if (v[x][y] > 0.0 && q[y] > 0.0) {
          const double i = std::log(v[x][y] / q[y]);
          m1 += p[x] * v[x][y] * i;
          m2 += p[x] * v[x][y] * i * i;
        }
      }
    }
    return m2 - m1 * m1;
  };
  double best = 0.0;
  double ba = 0.0, b0 = 0.0, b1 = 0.0;
  for (int ia = 0; ia <= 100; ++ia) {
    for (int i0 = 0; i0 <= 100; ++i0) {
      for (int i1 = 0; i1 <= 100; ++i1) {
        const double value = var(ia / 100.0, i0 / 100.0, i1 / 100.0);
        if (value > best) {
          best = value;
          ba = ia / 100.0;
          b0 = i0 / 100.0;
          b1 = i1 / 100.0;
        }
      }
    }
  }
  for (int ia = -20; ia <= 20; ++ia) {
    for (int i0 = -20; i0 <= 20; ++i0) {
      for (int i1 = -20; i1 <= 20; ++i1) {
        const double a = std::clamp(ba + ia * 1e-3, 0.0, 1.0);
        const double v0 = std::clamp(b0 + i0 * 1e-3, 0.0, 1.0);
        const double v1 = std::clamp(b1 + i1 * 1e-3, 0.0, 1.0);
        best = std::max(best, var(a, v0, v1));
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("converse constants satisfy the psi identity") {
  const ConverseConstants c = make_converse_constants(1.7, 0.1);
  CHECK(c.psi * c.psi == doctest::Approx(2.0 * 1.7 / 0.1).epsilon(1e-15));
  CHECK(c.certified == "heuristic max");
  CHECK_THROWS_AS(make_converse_constants(1.5, 0.5), DomainError);
  CHECK_THROWS_AS(make_converse_constants(1.5, 0.0), DomainError);
  CHECK_THROWS_AS(make_converse_constants(0.5, 0.1), DomainError);
}

TEST_CASE("constant A on trivial and pinned shapes") {
  {
    Matrix one(1, 1);
    one << 1.0;
    CHECK(constant_A(ingest_channel(one), 8, 1) == doctest::Approx(1.0));
  }
  {
    const Channel bsc = ingest_channel(oracle::bsc_matrix(0.1));
    const double a = constant_A(bsc, 32, 7);
    CHECK(a >= info_density_variance(uniform_input(2), as_test_channel(bsc)) + 1.0);
    const double brute = brute_variance_2x2();
    CHECK(a >= brute + 1.0 - 1e-4);
    CHECK(a <= brute + 1.0 + 0.02);
  }
}

TEST_CASE("constant A is deterministic across thread counts") {
  const Channel bsc = ingest_channel(oracle::bsc_matrix(0.2));
  const double a = constant_A(bsc, 16, 3);
  mdcc::detail::set_thread_limit(1);
  const double b = constant_A(bsc, 16, 3);
  mdcc::detail::set_thread_limit(0);
  CHECK(a == b);
}

TEST_CASE("Gallager upper bound") {
  const Channel bsc = ingest_channel(oracle::bsc_matrix(0.1));
  CHECK(gallager_upper(100, oracle::kCBsc01, bsc) == doctest::Approx(1.0));

  // Log-slope in n equals the negative exponent.
  const double l1 = log_gallager_upper(1000, 0.2, bsc);
  const double l2 = log_gallager_upper(10000, 0.2, bsc);
  const ExponentPoint er = err_exponent(0.2, bsc);
  CHECK(std::abs((l2 - l1) / 9000.0 + er.E_r) <= 1e-9);

  CHECK(gallager_upper(1000, 0.2, bsc) ==
        doctest::Approx(4.0 * std::exp(-1000.0 * er.E_r)).epsilon(1e-12));
  CHECK_THROWS_AS(gallager_upper(0, 0.2, bsc), DomainError);
}

TEST_CASE("strong converse bound arithmetic") {
  CHECK(strong_converse_lower(10, 0.01, 1.5) == 0.0);  // vacuous, clamped
  CHECK(strong_converse_lower(1000000, 0.01, 1.0) ==
        doctest::Approx(1.0 - 1e-2 - std::exp(-1e4)).epsilon(1e-12));

  // The paper's instantiation delta = psi/sqrt(n) leaves at least 1 - gamma
  // once the exponential tail drops below gamma/2.
  const ConverseConstants c = make_converse_constants(1.6, 0.1);
  for (long n : {100000L, 1000000L}) {
    const double delta = c.psi / std::sqrt(static_cast<double>(n));
    const double bound = strong_converse_lower(n, delta, c.A);
    REQUIRE(std::exp(-c.psi * std::sqrt(static_cast<double>(n))) <= c.gamma / 2.0);
    CHECK(bound >= 1.0 - c.gamma);
  }
  CHECK_THROWS_AS(strong_converse_lower(10, 0.0, 1.0), DomainError);
}

TEST_CASE("change-of-measure bound forms and applicability") {
  const Channel bsc = ingest_channel(oracle::bsc_matrix(0.1));
  const CapacityResult cap = capacity(bsc, 1e-10);
  const ConverseConstants consts = make_converse_constants(constant_A(bsc, 32, 5), 0.1);
  const auto uniform = uniform_input(2);

  // Small n: the backoff eats the whole rate, so the bound is inapplicable.
  {
    const ComLowerResult r = com_lower(100, cap.C - 0.1, uniform, 0.1, consts, bsc, cap.C);
    CHECK_FALSE(r.applicable);
  }
  // Large n: applicable, and form (b) matches its displayed composition.
  {
    const long n = 1000000;
    const ComLowerResult r = com_lower(n, cap.C - 0.01, uniform, 0.1, consts, bsc, cap.C);
    REQUIRE(r.applicable);
    CHECK(r.delta_n ==
          doctest::Approx(0.01 + 2.0 * consts.psi / std::sqrt(1e6)).epsilon(1e-12));
    const double esp = esp_exponent(cap.C - r.delta_n, bsc).E_SP;
    const double expected_log =
        -binary_entropy(0.9) / 0.9 - static_cast<double>(n) * esp / 0.9;
    CHECK(r.log_form_b == doctest::Approx(expected_log).epsilon(1e-9));
    CHECK(r.form_b <= std::exp(-binary_entropy(0.9) / 0.9) + 1e-12);
    // Form (a) needs the minimum divergence at the same backoff.
    const double d_min = esp_haroutunian(cap.C - 0.01 - 2.0 * consts.psi / std::sqrt(1e6),
                                         bsc, uniform);
    CHECK(r.log_form_a ==
          doctest::Approx(-static_cast<double>(n) * d_min / 0.9 - binary_entropy(0.9) / 0.9)
              .epsilon(1e-6));
  }
  // Exact applicability frontier in n for the rate condition.
  {
    const double eps_n = 0.05;
    const double backoff_limit = cap.C - eps_n;  // need 2 psi/sqrt(n) < this
    const double n_star = std::pow(2.0 * consts.psi / backoff_limit, 2.0);
    const long below = static_cast<long>(std::floor(n_star * 0.98));
    const long above = static_cast<long>(std::ceil(n_star * 1.02));
    CHECK_FALSE(
        com_lower(below, cap.C - eps_n, uniform, 0.1, consts, bsc, cap.C, false).applicable);
    CHECK(com_lower(above, cap.C - eps_n, uniform, 0.1, consts, bsc, cap.C, false).applicable);
  }
  // gamma -> 0: the prefactor exponent h(1-gamma)/(1-gamma) vanishes.
  {
    double previous = 1.0;
    for (double gamma : {0.2, 0.1, 0.05, 0.01}) {
      const double prefactor_exponent = binary_entropy(1.0 - gamma) / (1.0 - gamma);
      CHECK(prefactor_exponent < previous);
      previous = prefactor_exponent;
    }
    CHECK(previous <= 0.06);
  }
}

TEST_CASE("normal approximation rate") {
  CHECK(normal_approx_rate(1000, 0.1, oracle::kCBsc01, oracle::kSigma2Bsc01) ==
        doctest::Approx(oracle::kNormalRateBsc01N1000).epsilon(1e-12));

  // eps -> 1/2 recovers capacity.
  CHECK(normal_approx_rate(1000, 0.4999999, oracle::kCBsc01, oracle::kSigma2Bsc01) ==
        doctest::Approx(oracle::kCBsc01).epsilon(1e-6));

  // Monotone increasing in n, always below capacity, exact sqrt(1/n) shape.
  double previous = -1.0;
  for (long n : {500L, 1000L, 2000L}) {
    const double rate = normal_approx_rate(n, 0.1, oracle::kCBsc01, oracle::kSigma2Bsc01);
    CHECK(rate < oracle::kCBsc01);
    CHECK(rate > previous);
    CHECK(oracle::kCBsc01 - rate ==
          doctest::Approx(std::sqrt(oracle::kSigma2Bsc01 / static_cast<double>(n)) *
                          oracle::kPhiInv09)
              .epsilon(1e-12));
    previous = rate;
  }

  CHECK_THROWS_AS(normal_approx_rate(1000, 0.6, oracle::kCBsc01, oracle::kSigma2Bsc01),
                  DomainError);
  CHECK_THROWS_AS(normal_approx_rate(1000, 0.1, oracle::kCBsc01, 0.0), ZeroDispersion);

  // The channel overload wires capacity and dispersion internally.
  CHECK(normal_approx_rate(1000, 0.1, ingest_channel(oracle::bsc_matrix(0.1))) ==
        doctest::Approx(oracle::kNormalRateBsc01N1000).epsilon(1e-7));
}

TEST_CASE("Gaussian quantile accuracy") {
  CHECK(inverse_gaussian_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(inverse_gaussian_cdf(0.9) - oracle::kPhiInv09) <= 1e-9);
  for (double q : {0.001, 0.01, 0.1, 0.3, 0.7, 0.975, 0.9999}) {
    CHECK(inverse_gaussian_cdf(q) ==
          doctest::Approx(-inverse_gaussian_cdf(1.0 - q)).epsilon(1e-11));
    // Bisection oracle against the double-precision cdf.
    double lo = -10.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < q) lo = mid; else hi = mid;
    }
    CHECK(std::abs(inverse_gaussian_cdf(q) - 0.5 * (lo + hi)) <= 1e-9);
  }
  CHECK_THROWS_AS(inverse_gaussian_cdf(0.0), DomainError);
  CHECK_THROWS_AS(inverse_gaussian_cdf(1.0), DomainError);
}

TEST_CASE("bound monotonicity in n") {
  const Channel bsc = ingest_channel(oracle::bsc_matrix(0.1));
  const CapacityResult cap = capacity(bsc, 1e-10);
  const ConverseConstants consts = make_converse_constants(constant_A(bsc, 32, 5), 0.1);
  double previous_upper = 2.0;
  double previous_lower_log = 1.0;
  for (long n : {10000L, 40000L, 160000L, 640000L}) {
    const double eps_n = std::pow(static_cast<double>(n), -1.0 / 3.0);
    const double upper = gallager_upper(n, cap.C - eps_n, bsc);
    CHECK(upper <= previous_upper + 1e-15);
    previous_upper = upper;
    const ComLowerResult r =
        com_lower(n, cap.C - eps_n, uniform_input(2), 0.1, consts, bsc, cap.C, false);
    if (r.applicable) {
      CHECK(r.log_form_b <= previous_lower_log);
      previous_lower_log = r.log_form_b;
    }
  }
}
